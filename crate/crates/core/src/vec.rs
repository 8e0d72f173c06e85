//! Dense point vectors for iterates, gradients, and momentum buffers.
//!
//! Every constructor and arithmetic helper checks that entries stay finite,
//! so a NaN or overflow surfaces as an error at the operation that produced
//! it instead of propagating silently through a run.

use crate::error::{Error, Result};

/// A d-dimensional point in R^d with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PointVec {
    entries: Vec<f64>,
}

impl PointVec {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("dim", "vector must have at least one entry"));
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::non_finite(format!("entry {i} of new vector"), None));
        }
        Ok(PointVec { entries })
    }

    /// The zero vector of the given dimension.
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "dimension must be positive"));
        }
        Ok(PointVec {
            entries: vec![0.0; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    /// Entry access; panics on out-of-range index like slice indexing.
    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }

    pub fn dot(&self, other: &PointVec) -> Result<f64> {
        check_dims(self, other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// self - other.
    pub fn sub(&self, other: &PointVec) -> Result<PointVec> {
        vec_axpy(-1.0, other, self)
    }

    /// self + other.
    pub fn add(&self, other: &PointVec) -> Result<PointVec> {
        vec_axpy(1.0, other, self)
    }

    /// a * self, with the result checked for finiteness.
    pub fn scale(&self, a: f64) -> Result<PointVec> {
        let scaled: Vec<f64> = self.entries.iter().map(|v| a * v).collect();
        finite_or_err(scaled, "scale result")
    }

    /// True when every entry is finite. Library code uses this as the
    /// boundary check after optimizer updates.
    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.is_finite())
    }
}

impl std::ops::Index<usize> for PointVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// Returns a*x + y. Errors on dimension mismatch or a non-finite result.
pub fn vec_axpy(a: f64, x: &PointVec, y: &PointVec) -> Result<PointVec> {
    check_dims(x, y)?;
    let entries: Vec<f64> = x
        .entries
        .iter()
        .zip(&y.entries)
        .map(|(xi, yi)| a * xi + yi)
        .collect();
    finite_or_err(entries, "axpy result")
}

fn check_dims(x: &PointVec, y: &PointVec) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(())
}

fn finite_or_err(entries: Vec<f64>, context: &str) -> Result<PointVec> {
    if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
        return Err(Error::non_finite(format!("entry {i} of {context}"), None));
    }
    Ok(PointVec { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> PointVec {
        PointVec::new(v.to_vec()).unwrap()
    }

    #[test]
    fn axpy_zero_scale_is_identity_on_y() {
        let r = vec_axpy(0.0, &pv(&[1.0, 2.0]), &pv(&[3.0, 4.0])).unwrap();
        assert_eq!(r.as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn axpy_unit_scale_onto_zero() {
        let r = vec_axpy(1.0, &pv(&[1.0, 2.0]), &pv(&[0.0, 0.0])).unwrap();
        assert_eq!(r.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn axpy_hand_arithmetic() {
        let r = vec_axpy(-0.5, &pv(&[2.0, 4.0]), &pv(&[1.0, 1.0])).unwrap();
        assert_eq!(r.as_slice(), &[0.0, -1.0]);
    }

    #[test]
    fn axpy_dimension_mismatch_reports_both_dims() {
        let err = vec_axpy(1.0, &pv(&[1.0]), &pv(&[1.0, 2.0])).unwrap_err();
        match err {
            Error::DimensionMismatch { left, right } => {
                assert_eq!((left, right), (1, 2));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn nan_rejected_on_construction() {
        assert!(PointVec::new(vec![1.0, f64::NAN]).is_err());
        assert!(PointVec::new(vec![f64::INFINITY]).is_err());
        assert!(PointVec::new(vec![]).is_err());
    }

    #[test]
    fn overflowing_axpy_is_an_error_not_inf() {
        let big = pv(&[f64::MAX]);
        assert!(vec_axpy(2.0, &big, &big).is_err());
    }
}
