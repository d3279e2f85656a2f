//! Dirichlet sine basis of -d²/dx² on (0, L) and modal transforms.
//!
//! Eigenpairs are closed form: λ_k = (kπ/L)², w_k(x) = √(2/L) sin(kπx/L),
//! k = 1-based. Projection integrals use composite Simpson; everything
//! downstream works on the modal coefficients, so this module is the
//! only place touching physical space.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralBasis {
    pub length_l: f64,
    pub n_modes: usize,
    /// Number of Simpson subintervals for projection (even).
    pub quad_points: usize,
}

impl SpectralBasis {
    pub fn new(length_l: f64, n_modes: usize) -> Result<SpectralBasis> {
        SpectralBasis::with_quad_points(length_l, n_modes, (64 * n_modes).max(4096))
    }

    pub fn with_quad_points(
        length_l: f64,
        n_modes: usize,
        quad_points: usize,
    ) -> Result<SpectralBasis> {
        if !(length_l > 0.0) {
            return Err(Error::Domain(format!("length must be > 0, got {length_l}")));
        }
        if n_modes < 1 {
            return Err(Error::Domain("need at least one mode".into()));
        }
        if quad_points < 2 || quad_points % 2 != 0 {
            return Err(Error::Domain(format!(
                "quad_points must be even and >= 2, got {quad_points}"
            )));
        }
        Ok(SpectralBasis { length_l, n_modes, quad_points })
    }

    /// λ_k = (kπ/L)², k = 1..n_modes.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        debug_assert!((1..=self.n_modes).contains(&k));
        let kpil = k as f64 * std::f64::consts::PI / self.length_l;
        kpil * kpil
    }

    /// Orthonormal mode w_k(x) = √(2/L) sin(kπx/L).
    pub fn mode(&self, k: usize, x: f64) -> f64 {
        debug_assert!((1..=self.n_modes).contains(&k));
        (2.0 / self.length_l).sqrt() * (k as f64 * std::f64::consts::PI * x / self.length_l).sin()
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n_modes).map(|k| self.eigenvalue(k))
    }
}

/// Coefficients against the orthonormal sine modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModalCoefficients {
    pub basis: SpectralBasis,
    pub coeffs: Vec<f64>,
}

impl ModalCoefficients {
    pub fn new(basis: SpectralBasis, coeffs: Vec<f64>) -> Result<ModalCoefficients> {
        if coeffs.len() != basis.n_modes {
            return Err(Error::Config(format!(
                "{} coefficients for a basis of {} modes",
                coeffs.len(),
                basis.n_modes
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numerical("non-finite modal coefficient".into()));
        }
        Ok(ModalCoefficients { basis, coeffs })
    }

    pub fn zeros(basis: SpectralBasis) -> ModalCoefficients {
        ModalCoefficients { basis, coeffs: vec![0.0; basis.n_modes] }
    }

    /// Unit vector along mode k (1-based).
    pub fn unit(basis: SpectralBasis, k: usize) -> Result<ModalCoefficients> {
        if !(1..=basis.n_modes).contains(&k) {
            return Err(Error::Config(format!(
                "mode {k} outside 1..={}",
                basis.n_modes
            )));
        }
        let mut coeffs = vec![0.0; basis.n_modes];
        coeffs[k - 1] = 1.0;
        Ok(ModalCoefficients { basis, coeffs })
    }
}

/// Analysis transform: coeffs[k-1] = ∫₀ᴸ f(x) w_k(x) dx by composite
/// Simpson with `quad_points` panels.
pub fn project(sample: impl Fn(f64) -> f64, basis: &SpectralBasis) -> Result<ModalCoefficients> {
    let n = basis.quad_points;
    let h = basis.length_l / n as f64;
    let fs: Vec<f64> = (0..=n).map(|i| sample(h * i as f64)).collect();
    if fs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("sample not evaluable on [0, L]".into()));
    }
    let mut coeffs = Vec::with_capacity(basis.n_modes);
    for k in 1..=basis.n_modes {
        let mut acc = 0.0;
        for (i, &f) in fs.iter().enumerate() {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * f * basis.mode(k, h * i as f64);
        }
        coeffs.push(acc * h / 3.0);
    }
    ModalCoefficients::new(*basis, coeffs)
}

/// Synthesis: pointwise Σ_k c_k w_k(x), ascending k.
pub fn reconstruct(mc: &ModalCoefficients, x_nodes: &[f64]) -> Result<Vec<f64>> {
    let l = mc.basis.length_l;
    if x_nodes.iter().any(|&x| !(0.0..=l).contains(&x)) {
        return Err(Error::Domain(format!("reconstruction points must lie in [0, {l}]")));
    }
    Ok(x_nodes
        .iter()
        .map(|&x| {
            (1..=mc.basis.n_modes)
                .map(|k| mc.coeffs[k - 1] * mc.basis.mode(k, x))
                .sum()
        })
        .collect())
}

/// (L², H¹₀, H²) norms from the coefficients: Parseval with weights
/// 1, λ_k, λ_k².
pub fn norms(mc: &ModalCoefficients) -> (f64, f64, f64) {
    let mut l2 = 0.0;
    let mut h10 = 0.0;
    let mut h2 = 0.0;
    for (k, &c) in mc.coeffs.iter().enumerate() {
        let lam = mc.basis.eigenvalue(k + 1);
        l2 += c * c;
        h10 += lam * c * c;
        h2 += lam * lam * c * c;
    }
    (l2.sqrt(), h10.sqrt(), h2.sqrt())
}
