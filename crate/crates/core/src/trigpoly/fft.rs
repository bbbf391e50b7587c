//! Multi-dimensional DFT over `Z_{m_1} x ... x Z_{m_k}`, row-major with the
//! first coordinate most significant.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `table[x] = Σ_a c_a exp(+2πi a·x/m)`: coefficients to samples.
    Synthesis,
    /// `table[a] = Σ_x f_x exp(-2πi a·x/m)`: samples to (unnormalized) coefficients.
    Analysis,
}

pub(crate) fn transform(table: &mut [Complex64], dims: &[u64], dir: Direction) {
    let direction = match dir {
        Direction::Synthesis => FftDirection::Inverse,
        Direction::Analysis => FftDirection::Forward,
    };
    let total: usize = dims.iter().map(|&m| m as usize).product();
    assert_eq!(table.len(), total, "table does not match the group shape");
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = total;
    let mut line = Vec::new();
    for &m in dims {
        let m = m as usize;
        let inner = stride / m;
        stride = inner;
        if m == 1 {
            continue;
        }
        let fft = planner.plan_fft(m, direction);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        line.resize(m, Complex64::new(0.0, 0.0));
        let block = m * inner;
        for outer in (0..total).step_by(block) {
            for off in 0..inner {
                let base = outer + off;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = table[base + t * inner];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    table[base + t * inner] = *v;
                }
            }
        }
    }
}
