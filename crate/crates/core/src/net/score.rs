//! Double-cone localization score from a wedge family.

use serde::{Deserialize, Serialize};

use crate::error::{ModlocError, Result};
use crate::linalg::*;
use crate::subspace::RealSubspace;

/// Options for the score computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    /// Fraction of radial rings excluded at each end of the grid for the windowed score.
    pub edge_fraction: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self { edge_fraction: 0.1, max_iter: 400, tol: 1e-10 }
    }
}

/// One row of a localization sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub kappa: f64,
    pub grid: usize,
    pub n_wedges: usize,
    pub cutoff: f64,
    /// Largest eigenvalue of the windowed mean projection.
    pub score: f64,
    /// Same without the radial window.
    pub raw_score: f64,
    pub edge_rings: usize,
    pub min_principal_angle: f64,
    /// `(i, j, smallest principal angle between H(W_i) and H(W_j))`.
    pub principal_angles: Vec<(usize, usize, f64)>,
    pub wedge_dims: Vec<usize>,
    pub kept_fraction: f64,
}

impl LocalizationReport {
    pub const CSV_HEADER: &'static str = "kappa,grid,n_wedges,cutoff,score,min_principal_angle";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.6}",
            self.kappa, self.grid, self.n_wedges, self.cutoff, self.score, self.min_principal_angle
        )
    }
}

/// `lambda_max(M (1/m) sum_i P_i M)` with `M` the optional coordinate mask.
///
/// Returns the value and the maximizing realified vector.
pub fn mean_projection_max(hs: &[RealSubspace], mask: Option<&[bool]>, cfg: &ScoreConfig) -> Result<(f64, RVec)> {
    let first = hs.first().ok_or(ModlocError::EmptyFamily)?;
    let n = first.ambient_dim();
    for h in hs {
        if h.ambient_dim() != n {
            return Err(ModlocError::AmbientMismatch(n, h.ambient_dim()));
        }
    }
    let qs: Vec<RMat> = hs.iter().map(|h| h.realified()).collect();
    let m = qs.len() as f64;
    let rmask: Option<RVec> = mask.map(|mk| RVec::from_shape_fn(2 * n, |k| if mk[k % n] { 1.0 } else { 0.0 }));
    let apply = |x: &RVec| {
        let x = match &rmask {
            Some(mk) => x * mk,
            None => x.clone(),
        };
        let mut y = RVec::zeros(2 * n);
        for q in &qs {
            y += &q.dot(&q.t().dot(&x));
        }
        y /= m;
        match &rmask {
            Some(mk) => y * mk,
            None => y,
        }
    };
    let (val, vec) = lanczos_max(2 * n, apply, cfg.max_iter, cfg.tol);
    Ok((val.clamp(0.0, 1.0), vec))
}

/// Smallest principal angle between two subspaces (0 if they share a vector).
pub fn min_principal_angle(a: &RealSubspace, b: &RealSubspace) -> f64 {
    if a.dim() == 0 || b.dim() == 0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let cos = principal_cosines(a.realified().view(), b.realified().view());
    cos.iter().cloned().fold(0.0, f64::max).min(1.0).acos()
}

/// Pairwise smallest principal angles.
pub fn principal_angle_table(hs: &[RealSubspace]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            out.push((i, j, min_principal_angle(&hs[i], &hs[j])));
        }
    }
    out
}
