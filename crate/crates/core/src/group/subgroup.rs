//! Subgroups of `Z_{m_1} x ... x Z_{m_k}` as lattices in `Z^k` containing
//! `diag(m) Z^k`, canonicalized by their Hermite basis.
//!
//! The same type serves subgroups of `G` and of its dual, which share the
//! presentation.

use num_integer::Integer;

use super::smith::{lattice_hermite_basis, smith_normal_form, IntMatrix};
use super::{Character, FiniteAbelianGroup};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    ambient: FiniteAbelianGroup,
    basis: IntMatrix,
}

impl Subgroup {
    pub fn generated<V: AsRef<[u64]>>(ambient: &FiniteAbelianGroup, generators: &[V]) -> Result<Self> {
        let mut rows = Vec::with_capacity(generators.len());
        for g in generators {
            let g = g.as_ref();
            ambient.check_shape(g.len())?;
            rows.push(g.iter().map(|&x| x as i128).collect());
        }
        Ok(Self::from_rows(ambient, &rows))
    }

    fn from_rows(ambient: &FiniteAbelianGroup, rows: &[Vec<i128>]) -> Self {
        Self {
            ambient: ambient.clone(),
            basis: lattice_hermite_basis(rows, &ambient.moduli()),
        }
    }

    pub fn trivial(ambient: &FiniteAbelianGroup) -> Self {
        Self::from_rows(ambient, &[])
    }

    pub fn whole(ambient: &FiniteAbelianGroup) -> Self {
        let k = ambient.rank();
        let rows: Vec<Vec<i128>> = (0..k)
            .map(|j| (0..k).map(|c| i128::from(c == j)).collect())
            .collect();
        Self::from_rows(ambient, &rows)
    }

    pub fn ambient(&self) -> &FiniteAbelianGroup {
        &self.ambient
    }

    /// Canonical Hermite basis; equal subgroups have equal bases.
    pub fn canonical_basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Nonzero canonical basis rows reduced into the group.
    pub fn canonical_generators(&self) -> Vec<Vec<u64>> {
        let moduli = self.ambient.moduli();
        self.basis
            .rows()
            .map(|r| {
                r.iter()
                    .zip(&moduli)
                    .map(|(&x, &m)| x.rem_euclid(m as i128) as u64)
                    .collect::<Vec<u64>>()
            })
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect()
    }

    fn index_in_lattice(&self) -> u64 {
        (0..self.basis.nrows())
            .map(|j| self.basis[(j, j)] as u64)
            .product()
    }

    pub fn order(&self) -> u64 {
        self.ambient.order() / self.index_in_lattice()
    }

    /// Smallest `m >= 1` with `m·v` in the subgroup, i.e. the order of the
    /// coset of `v` in the quotient.
    pub fn coset_order(&self, v: &[u64]) -> u64 {
        let moduli = self.ambient.moduli();
        let k = moduli.len();
        let mut cur: Vec<i128> = v
            .iter()
            .zip(&moduli)
            .map(|(&x, &m)| (x % m) as i128)
            .collect();
        let mut mult: u64 = 1;
        for j in 0..k {
            let h = self.basis[(j, j)];
            let r = cur[j].rem_euclid(h);
            let o = h / r.gcd(&h);
            if o > 1 {
                mult *= o as u64;
                cur.iter_mut().for_each(|x| *x *= o);
            }
            let q = Integer::div_floor(&cur[j], &h);
            for c in j..k {
                cur[c] -= q * self.basis[(j, c)];
            }
            for c in j + 1..k {
                cur[c] = cur[c].rem_euclid(moduli[c] as i128);
            }
        }
        mult
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.coset_order(v) == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.canonical_generators().iter().all(|g| other.contains(g))
    }

    pub fn join(&self, extra: &[Vec<u64>]) -> Subgroup {
        let mut rows: Vec<Vec<i128>> = self.basis.rows().map(|r| r.to_vec()).collect();
        rows.extend(extra.iter().map(|g| g.iter().map(|&x| x as i128).collect()));
        Self::from_rows(&self.ambient, &rows)
    }

    /// `H^⊥ = {γ : γ(x) = 1 for all x in H}`, from the Smith form of the
    /// Hermite basis: the dual lattice is spanned by the columns of `V`
    /// divided by the invariant factors.
    pub fn annihilator(&self) -> Subgroup {
        let moduli = self.ambient.moduli();
        let k = moduli.len();
        let snf = smith_normal_form(&self.basis);
        let mut rows = Vec::with_capacity(k);
        for i in 0..k {
            let s = snf.s[(i, i)];
            let row: Vec<i128> = (0..k)
                .map(|j| {
                    let num = moduli[j] as i128 * snf.v[(j, i)];
                    debug_assert_eq!(num % s, 0, "annihilator generator not integral");
                    num / s
                })
                .collect();
            rows.push(row);
        }
        Self::from_rows(&self.ambient, &rows)
    }

    /// Cyclic decomposition of `self / inner` (requires `inner ⊆ self`):
    /// pairs `(q_i, generator)` with `q_i > 1`, `q_1 | q_2 | ...`.
    pub fn quotient_decomposition(&self, inner: &Subgroup) -> Vec<(u64, Vec<u64>)> {
        let moduli = self.ambient.moduli();
        let k = moduli.len();
        // express inner's basis rows in coordinates of self's triangular basis
        let mut rel = IntMatrix::zeros(k, k);
        for (ri, r) in inner.basis.rows().enumerate() {
            let mut c = vec![0i128; k];
            for j in 0..k {
                let mut acc = r[j];
                for i in 0..j {
                    acc -= c[i] * self.basis[(i, j)];
                }
                let h = self.basis[(j, j)];
                debug_assert_eq!(acc % h, 0, "inner is not contained in self");
                c[j] = acc / h;
            }
            for j in 0..k {
                rel[(ri, j)] = c[j];
            }
        }
        let snf = smith_normal_form(&rel);
        let gens = snf.v_inv.mul(&self.basis);
        (0..k)
            .filter(|&i| snf.s[(i, i)] > 1)
            .map(|i| {
                let g = gens
                    .row(i)
                    .iter()
                    .zip(&moduli)
                    .map(|(&x, &m)| x.rem_euclid(m as i128) as u64)
                    .collect();
                (snf.s[(i, i)] as u64, g)
            })
            .collect()
    }

    /// Invariant factors of the subgroup itself.
    pub fn invariant_factors(&self) -> Vec<u64> {
        self.quotient_decomposition(&Subgroup::trivial(&self.ambient))
            .into_iter()
            .map(|(q, _)| q)
            .collect()
    }

    /// All elements, generated from the cyclic decomposition.
    pub fn elements(&self) -> Result<Vec<Vec<u64>>> {
        let order = self.order();
        if order > super::ENUMERATION_LIMIT {
            return Err(crate::error::Error::EnumerationBudget {
                order,
                budget: super::ENUMERATION_LIMIT,
            });
        }
        let moduli = self.ambient.moduli();
        let mut out = vec![vec![0u64; moduli.len()]];
        for (q, g) in self.quotient_decomposition(&Subgroup::trivial(&self.ambient)) {
            let mut next = Vec::with_capacity(out.len() * q as usize);
            for base in &out {
                for t in 0..q {
                    next.push(
                        base.iter()
                            .zip(&g)
                            .zip(&moduli)
                            .map(|((&b, &x), &m)| ((b as u128 + t as u128 * x as u128) % m as u128) as u64)
                            .collect(),
                    );
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }
}

/// The ascending chain `Γ_1 ⊂ Γ_2 ⊂ ... ⊂ Γ = ⟨Λ⟩` with `Γ_1 = ⟨M⟩` for a
/// maximal independent `M ⊂ Γ` and `Γ_l = {γ ∈ Γ : γ^l ∈ Γ_{l-1}}`.
#[derive(Debug, Clone)]
pub struct GammaTower {
    pub generated: Subgroup,
    pub independent: Vec<Character>,
    /// `levels[l - 1]` is `Γ_l`; the last entry equals `generated`.
    pub levels: Vec<Subgroup>,
}

impl GammaTower {
    /// Index `L` of the first level equal to `Γ`.
    pub fn stabilization_index(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, l: usize) -> &Subgroup {
        let last = self.levels.len() - 1;
        &self.levels[(l - 1).min(last)]
    }

    /// Smallest `l` whose level contains every given character.
    pub fn first_level_containing(&self, chars: &[Character]) -> usize {
        (1..=self.levels.len())
            .find(|&l| chars.iter().all(|c| self.level(l).contains(&c.0)))
            .unwrap_or(self.levels.len())
    }
}

/// Builds the tower for `Λ` inside `dual`. `M` is extracted greedily from
/// `priority`, then `Λ`, then the canonical generators of `Γ`, and finally
/// completed so that `⟨M⟩` contains every element of prime order of `Γ`.
pub fn gamma_tower(
    dual: &FiniteAbelianGroup,
    lambda: &[Character],
    priority: &[Character],
) -> Result<GammaTower> {
    let gens: Vec<&[u64]> = lambda.iter().map(|c| c.0.as_slice()).collect();
    let generated = Subgroup::generated(dual, &gens)?;

    let mut independent: Vec<Character> = Vec::new();
    let mut span = Subgroup::trivial(dual);
    let try_add = |x: &[u64], independent: &mut Vec<Character>, span: &mut Subgroup| {
        let o = dual.character_order(&Character(x.to_vec()));
        if o == 1 || !generated.contains(x) {
            return;
        }
        let joined = span.join(&[x.to_vec()]);
        if joined.order() == span.order() * o {
            independent.push(Character(x.to_vec()));
            *span = joined;
        }
    };

    let canonical = generated.canonical_generators();
    for c in priority.iter().chain(lambda) {
        dual.check_shape(c.0.len())?;
        try_add(&c.0, &mut independent, &mut span);
    }
    for g in &canonical {
        try_add(g, &mut independent, &mut span);
    }
    // socle completion: an element of prime order outside ⟨M⟩ is independent of M
    let structure = generated.quotient_decomposition(&Subgroup::trivial(dual));
    let moduli = dual.moduli();
    for (q, g) in &structure {
        for p in prime_factors(*q) {
            let h: Vec<u64> = g
                .iter()
                .zip(&moduli)
                .map(|(&x, &m)| ((x as u128 * (q / p) as u128) % m as u128) as u64)
                .collect();
            if !span.contains(&h) {
                independent.push(Character(h.clone()));
                span = span.join(&[h]);
            }
        }
    }

    let mut levels = vec![span];
    let mut l: u64 = 1;
    while levels.last().unwrap() != &generated {
        l += 1;
        let prev = levels.last().unwrap();
        let extra: Vec<Vec<u64>> = generated
            .quotient_decomposition(prev)
            .into_iter()
            .filter_map(|(q, g)| {
                let step = q / q.gcd(&l);
                (step < q).then(|| {
                    g.iter()
                        .zip(&moduli)
                        .map(|(&x, &m)| ((x as u128 * step as u128) % m as u128) as u64)
                        .collect()
                })
            })
            .collect();
        let next = prev.join(&extra);
        levels.push(next);
    }
    Ok(GammaTower {
        generated,
        independent,
        levels,
    })
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z(orders: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(orders).unwrap()
    }

    // oracle: closure of the generators under addition, by enumeration
    fn brute_span(g: &FiniteAbelianGroup, gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let mut set = std::collections::BTreeSet::new();
        set.insert(vec![0u64; g.rank()]);
        loop {
            let mut grew = false;
            let cur: Vec<Vec<u64>> = set.iter().cloned().collect();
            for a in &cur {
                for b in gens {
                    let s = g.add(&GroupElement(a.clone()), &GroupElement(b.clone())).0;
                    grew |= set.insert(s);
                }
            }
            if !grew {
                return set.into_iter().collect();
            }
        }
    }

    fn brute_annihilator(g: &FiniteAbelianGroup, h: &[Vec<u64>]) -> Vec<Vec<u64>> {
        g.elements()
            .unwrap()
            .map(|c| c.0)
            .filter(|a| {
                h.iter().all(|x| {
                    g.pairing_turns(&Character(a.clone()), &GroupElement(x.clone())) == 0.0
                })
            })
            .collect()
    }

    #[test]
    fn annihilator_examples() {
        let g = z(&[4]);
        assert_eq!(Subgroup::whole(&g).annihilator(), Subgroup::trivial(&g));
        assert_eq!(Subgroup::trivial(&g).annihilator(), Subgroup::whole(&g));
        let h = Subgroup::generated(&g, &[[2u64]]).unwrap();
        assert_eq!(h.annihilator().elements().unwrap(), vec![vec![0], vec![2]]);
    }

    #[test]
    fn coset_order_examples() {
        let g = z(&[8]);
        let gamma = Subgroup::generated(&g, &[[4u64]]).unwrap();
        assert_eq!(gamma.coset_order(&[4]), 1);
        assert_eq!(gamma.coset_order(&[1]), 4);
        let g = z(&[9]);
        assert_eq!(Subgroup::trivial(&g).coset_order(&[3]), 3);
    }

    #[test]
    fn random_subgroups_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..60 {
            let k = rng.gen_range(1..=3);
            let orders: Vec<u64> = (0..k).map(|_| rng.gen_range(2..=10)).collect();
            let g = z(&orders);
            let ngen = rng.gen_range(0..=3);
            let gens: Vec<Vec<u64>> = (0..ngen)
                .map(|_| orders.iter().map(|&m| rng.gen_range(0..m)).collect())
                .collect();
            let h = Subgroup::generated(&g, &gens).unwrap();
            let span = brute_span(&g, &gens);
            assert_eq!(h.elements().unwrap(), span);
            assert_eq!(h.order() as usize, span.len());
            let ann = h.annihilator();
            assert_eq!(ann.elements().unwrap(), brute_annihilator(&g, &span));
            assert_eq!(h.order() * ann.order(), g.order());
            assert_eq!(ann.annihilator(), h);
            for x in g.elements().unwrap() {
                let want = (1..).find(|&m| {
                    let mx: Vec<u64> = x.0.iter().zip(&orders).map(|(&a, &q)| a * m % q).collect();
                    span.binary_search(&mx).is_ok()
                });
                assert_eq!(Some(h.coset_order(&x.0)), want);
            }
            let quotient: u64 = Subgroup::whole(&g)
                .quotient_decomposition(&h)
                .iter()
                .map(|(q, _)| q)
                .product();
            assert_eq!(quotient * h.order(), g.order());
        }
    }

    #[test]
    fn canonical_basis_decides_equality() {
        let g = z(&[6, 4]);
        let a = Subgroup::generated(&g, &[[2u64, 2]]).unwrap();
        let b = Subgroup::generated(&g, &[[4u64, 2], [2, 0]]).unwrap();
        // <(2,2)> = {(0,0),(2,2),(4,0),(0,2),(2,0),(4,2)}
        assert_eq!(a, b);
        assert!(a.is_subgroup_of(&Subgroup::whole(&g)));
        assert_eq!(a.invariant_factors(), vec![6]);
    }

    #[test]
    fn tower_examples() {
        let g = z(&[4]);
        let t = gamma_tower(&g, &[g.trivial_character()], &[]).unwrap();
        assert_eq!(t.stabilization_index(), 1);
        assert_eq!(t.levels[0].order(), 1);

        let t = gamma_tower(&g, &[Character(vec![2])], &[]).unwrap();
        assert_eq!(t.independent, vec![Character(vec![2])]);
        assert_eq!(t.stabilization_index(), 1);
        assert_eq!(t.levels[0].elements().unwrap(), vec![vec![0], vec![2]]);

        let t = gamma_tower(&g, &[Character(vec![1])], &[]).unwrap();
        assert_eq!(t.independent, vec![Character(vec![1])]);
        assert_eq!(t.levels[0], Subgroup::whole(&g));
    }

    #[test]
    fn tower_on_z9_with_priority() {
        let g = z(&[9]);
        let lambda = [Character(vec![1]), Character(vec![3])];
        let t = gamma_tower(&g, &lambda, &[Character(vec![3])]).unwrap();
        assert_eq!(t.independent, vec![Character(vec![3])]);
        assert_eq!(t.level(1).order(), 3);
        assert_eq!(t.level(2).order(), 3);
        assert_eq!(t.level(3), &Subgroup::whole(&g));
        assert_eq!(t.stabilization_index(), 3);
        assert_eq!(t.first_level_containing(&[Character(vec![3])]), 1);
    }

    #[test]
    fn tower_is_ascending_and_ends_at_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let k = rng.gen_range(1..=3);
            let orders: Vec<u64> = (0..k).map(|_| rng.gen_range(2..=16)).collect();
            let g = z(&orders);
            let lambda: Vec<Character> = (0..rng.gen_range(1..=4))
                .map(|_| Character(orders.iter().map(|&m| rng.gen_range(0..m)).collect()))
                .collect();
            let t = gamma_tower(&g, &lambda, &[]).unwrap();
            for w in t.levels.windows(2) {
                assert!(w[0].is_subgroup_of(&w[1]));
            }
            assert_eq!(t.levels.last().unwrap(), &t.generated);
            // independence of M and maximality: no element of Γ can be added
            let span = Subgroup::generated(&g, &t.independent.iter().map(|c| c.0.clone()).collect::<Vec<_>>()).unwrap();
            let prod: u64 = t.independent.iter().map(|c| g.character_order(c)).product();
            assert_eq!(span.order(), prod);
            for x in t.generated.elements().unwrap() {
                let o = g.character_order(&Character(x.clone()));
                if o > 1 {
                    assert_ne!(span.join(std::slice::from_ref(&x)).order(), span.order() * o);
                }
            }
            // level definition, checked by enumeration
            for l in 2..=t.levels.len() {
                let prev = t.level(l - 1);
                for x in t.generated.elements().unwrap() {
                    let lx: Vec<u64> = x.iter().zip(&orders).map(|(&a, &m)| a * l as u64 % m).collect();
                    assert_eq!(t.level(l).contains(&x), prev.contains(&lx));
                }
            }
        }
    }
}
