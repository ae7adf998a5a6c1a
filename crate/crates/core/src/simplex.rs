//! Geometry of the unit simplex `{x : Σ xᵢ = 1, x ≥ 0}`: feasible points,
//! coordinate faces, Euclidean projection and the Frank-Wolfe stationarity gap.

use std::cmp::Ordering;
use std::ops::Deref;

use crate::error::{check_dim, Error, Result};
use crate::vector::dot;

/// Components in `[-CLAMP_TOL, 0)` are snapped to zero on construction.
pub const CLAMP_TOL: f64 = 1e-12;
/// Sums within this distance of one are left untouched.
pub const SUM_TOL: f64 = 1e-12;
/// Largest sum drift that is silently renormalized away.
pub const RENORMALIZE_TOL: f64 = 1e-8;

/// A feasible point of the unit simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    /// Validates `coords`, clamping tiny negative entries and renormalizing small
    /// sum drift. Larger violations are reported as [`Error::Infeasible`].
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Infeasible("empty coordinate vector".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("simplex point"));
        }
        for c in coords.iter_mut() {
            if *c < 0.0 {
                if *c < -CLAMP_TOL {
                    return Err(Error::Infeasible(format!("negative component {c:e}")));
                }
                *c = 0.0;
            }
        }
        let sum: f64 = coords.iter().sum();
        let drift = (sum - 1.0).abs();
        if drift > RENORMALIZE_TOL {
            return Err(Error::Infeasible(format!("components sum to {sum}")));
        }
        if drift > SUM_TOL {
            coords.iter_mut().for_each(|c| *c /= sum);
        }
        Ok(SimplexPoint(coords))
    }

    /// The vertex `e_i` of the `n`-dimensional simplex.
    pub fn vertex(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::FaceIndexOutOfRange { index: i, dim: n });
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Ok(SimplexPoint(v))
    }

    pub fn barycenter(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Infeasible("empty coordinate vector".into()));
        }
        Ok(SimplexPoint(vec![1.0 / n as f64; n]))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Indices with a strictly positive component.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0.0).collect()
    }

    /// Wraps coordinates that are known to be feasible to working precision.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        SimplexPoint(coords)
    }
}

impl Deref for SimplexPoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for SimplexPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A non-empty, strictly increasing set of coordinate indices naming the face
/// `Δ_I = {x ∈ Δ : xᵢ = 0 for i ∉ I}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceIndexSet {
    indices: Vec<usize>,
    dim: usize,
}

impl FaceIndexSet {
    /// Sorts and deduplicates `indices`; fails on an empty set or out-of-range index.
    pub fn new(mut indices: Vec<usize>, dim: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyFace);
        }
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(Error::FaceIndexOutOfRange { index: last, dim });
            }
        }
        Ok(FaceIndexSet { indices, dim })
    }

    pub fn full(dim: usize) -> Result<Self> {
        Self::new((0..dim).collect(), dim)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// Returns true iff `min yᵢ ≥ -tol` and `|Σ yᵢ - 1| ≤ tol`.
pub fn is_feasible(y: &[f64], tol: f64) -> bool {
    if y.is_empty() || y.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let min = y.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = y.iter().sum();
    min >= -tol && (sum - 1.0).abs() <= tol
}

/// Euclidean projection of `y` onto the face `Δ_face`.
///
/// Sort-based threshold method: with `u` the face coordinates sorted in
/// descending order, `ρ = max{j : u_j - (Σ_{i≤j} u_i - 1)/j > 0}` and
/// `τ = (Σ_{i≤ρ} u_i - 1)/ρ`, the projection is `max(y_i - τ, 0)` on the face
/// and zero elsewhere. Inputs that already lie on the face are returned as is,
/// which makes the projection bitwise idempotent.
pub fn project_simplex(y: &[f64], face: &FaceIndexSet) -> Result<SimplexPoint> {
    check_dim(face.dim(), y.len())?;
    if face.is_empty() {
        return Err(Error::EmptyFace);
    }
    let idx = face.indices();
    if idx.iter().any(|&i| !y[i].is_finite()) {
        return Err(Error::NonFinite("projection input"));
    }

    let mut out = vec![0.0; y.len()];
    let face_sum: f64 = idx.iter().map(|&i| y[i]).sum();
    if idx.iter().all(|&i| y[i] >= 0.0) && (face_sum - 1.0).abs() <= SUM_TOL {
        for &i in idx {
            out[i] = y[i];
        }
        return Ok(SimplexPoint::from_raw(out));
    }

    let mut u: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    u.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mut prefix = 0.0;
    let mut tau = u[0] - 1.0;
    for (j, &uj) in u.iter().enumerate() {
        prefix += uj;
        let candidate = (prefix - 1.0) / (j + 1) as f64;
        if uj - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    for &i in idx {
        out[i] = (y[i] - tau).max(0.0);
    }
    Ok(SimplexPoint::from_raw(out))
}

/// Frank-Wolfe gap `max{0, gᵀx - minᵢ gᵢ}`; zero exactly at first-order
/// stationary points of `min f` over the simplex.
pub fn stationarity_gap(x: &[f64], g: &[f64]) -> Result<f64> {
    check_dim(x.len(), g.len())?;
    let min = g.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((dot(g, x) - min).max(0.0))
}

/// Stationarity gap of `x` on the face `Δ_N`, assuming `x` vanishes outside `N`.
pub fn face_gap(x: &[f64], g: &[f64], nonactive: &[usize]) -> Result<f64> {
    check_dim(x.len(), g.len())?;
    if nonactive.is_empty() {
        return Err(Error::EmptyFace);
    }
    let min = nonactive
        .iter()
        .map(|&i| g[i])
        .fold(f64::INFINITY, f64::min);
    let gx: f64 = nonactive.iter().map(|&i| g[i] * x[i]).sum();
    Ok((gx - min).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn full(n: usize) -> FaceIndexSet {
        FaceIndexSet::full(n).unwrap()
    }

    #[test]
    fn projection_of_symmetric_point_is_barycenter() {
        let p = project_simplex(&[0.5, 0.5, 0.5], &full(3)).unwrap();
        for v in p.iter() {
            assert_abs_diff_eq!(*v, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn projection_of_feasible_point_is_identity() {
        let p = project_simplex(&[0.2, 0.8], &full(2)).unwrap();
        assert_eq!(p.as_slice(), &[0.2, 0.8]);
    }

    #[test]
    fn projection_clips_negative_mass() {
        let p = project_simplex(&[1.2, 0.3, -0.5], &full(3)).unwrap();
        assert_abs_diff_eq!(p[0], 0.95, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.05, epsilon = 1e-15);
        assert_eq!(p[2], 0.0);
    }

    #[test]
    fn projection_onto_face_zeroes_outside_coordinates() {
        let face = FaceIndexSet::new(vec![0, 1], 3).unwrap();
        let p = project_simplex(&[-0.5, 1.5, -5.0], &face).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 1.0, 0.0]);
        let p = project_simplex(&[0.3, 0.3, 9.0], &face).unwrap();
        assert_eq!(p[2], 0.0);
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn empty_face_is_rejected() {
        assert_eq!(FaceIndexSet::new(vec![], 3), Err(Error::EmptyFace));
        assert!(matches!(
            FaceIndexSet::new(vec![3], 3),
            Err(Error::FaceIndexOutOfRange { index: 3, dim: 3 })
        ));
    }

    #[test]
    fn face_index_set_is_sorted_and_deduplicated() {
        let f = FaceIndexSet::new(vec![4, 1, 4, 0], 5).unwrap();
        assert_eq!(f.indices(), &[0, 1, 4]);
        assert!(f.contains(4));
        assert!(!f.contains(2));
    }

    #[test]
    fn gap_examples() {
        assert_eq!(
            stationarity_gap(&[0.5, 0.5, 0.0], &[1.0, -1.0, 5.0]).unwrap(),
            1.0
        );
        assert_eq!(
            stationarity_gap(&[1.0, 0.0, 0.0], &[0.0, 1.0, 2.0]).unwrap(),
            0.0
        );
        let third = 1.0 / 3.0;
        for c in [-2.5, 0.0, 7.25] {
            let gap = stationarity_gap(&[third, third, third], &[c, c, c]).unwrap();
            assert_abs_diff_eq!(gap, 0.0, epsilon = 1e-14);
        }
        assert!(matches!(
            stationarity_gap(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn feasibility_examples() {
        assert!(is_feasible(&[0.3, 0.7], 1e-12));
        assert!(!is_feasible(&[0.5, 0.6], 1e-12));
        assert!(is_feasible(&[-1e-15, 1.0], 1e-12));
        assert!(!is_feasible(&[f64::NAN, 1.0], 1e-12));
    }

    #[test]
    fn construction_clamps_and_renormalizes() {
        let p = SimplexPoint::new(vec![-1e-13, 0.5, 0.5 + 1e-9]).unwrap();
        assert_eq!(p[0], 0.0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(SimplexPoint::new(vec![-1e-6, 1.0]).is_err());
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![]).is_err());
    }

    #[test]
    fn one_dimensional_simplex_is_always_stationary() {
        let p = SimplexPoint::new(vec![1.0]).unwrap();
        assert_eq!(stationarity_gap(&p, &[-42.0]).unwrap(), 0.0);
        let q = project_simplex(&[17.0], &full(1)).unwrap();
        assert_eq!(q.as_slice(), &[1.0]);
    }
}
