//! Literal transcriptions of the classical momentum recursions.
//!
//! These run the displayed SGD / heavy-ball / Nesterov updates directly on a
//! fixed gradient sequence and exist as independent oracles for the
//! reduction-equivalence checks; production runs go through `sum_step`.

use crate::error::{Error, Result};
use crate::vec::PointVec;

fn check_inputs(x0: &PointVec, gammas: &[f64], gs: &[PointVec]) -> Result<()> {
    if gammas.len() != gs.len() {
        return Err(Error::DimensionMismatch {
            left: gammas.len(),
            right: gs.len(),
        });
    }
    for g in gs {
        if g.dim() != x0.dim() {
            return Err(Error::DimensionMismatch {
                left: x0.dim(),
                right: g.dim(),
            });
        }
    }
    Ok(())
}

/// x_{t+1} = x_t - (gamma_t / (1-beta)) g_t. Returns x_0..=x_T.
pub fn reference_sgd(
    x0: &PointVec,
    gammas: &[f64],
    gs: &[PointVec],
    beta: f64,
) -> Result<Vec<PointVec>> {
    check_inputs(x0, gammas, gs)?;
    let mut out = vec![x0.clone()];
    let mut x = x0.clone();
    for (gamma, g) in gammas.iter().zip(gs) {
        x = crate::vec::vec_axpy(-gamma / (1.0 - beta), g, &x)?;
        out.push(x.clone());
    }
    Ok(out)
}

/// m_{t+1} = beta m_t - gamma_t g_t, x_{t+1} = x_t + m_{t+1}; m_0 = 0.
/// Returns x_0..=x_T.
pub fn reference_shb(
    x0: &PointVec,
    gammas: &[f64],
    gs: &[PointVec],
    beta: f64,
) -> Result<Vec<PointVec>> {
    check_inputs(x0, gammas, gs)?;
    let mut out = vec![x0.clone()];
    let mut x = x0.clone();
    let mut m = PointVec::zeros(x0.dim())?;
    for (gamma, g) in gammas.iter().zip(gs) {
        m = crate::vec::vec_axpy(-gamma, g, &m.scale(beta)?)?;
        x = x.add(&m)?;
        out.push(x.clone());
    }
    Ok(out)
}

/// y_{t+1} = x_t - gamma_t g_t, x_{t+1} = y_{t+1} + beta (y_{t+1} - y_t);
/// y_0 = x_0. Returns x_0..=x_T.
pub fn reference_snag(
    x0: &PointVec,
    gammas: &[f64],
    gs: &[PointVec],
    beta: f64,
) -> Result<Vec<PointVec>> {
    check_inputs(x0, gammas, gs)?;
    let mut out = vec![x0.clone()];
    let mut x = x0.clone();
    let mut y_prev = x0.clone();
    for (gamma, g) in gammas.iter().zip(gs) {
        let y = crate::vec::vec_axpy(-*gamma, g, &x)?;
        let lead = y.sub(&y_prev)?;
        x = crate::vec::vec_axpy(beta, &lead, &y)?;
        y_prev = y;
        out.push(x.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> PointVec {
        PointVec::new(v.to_vec()).unwrap()
    }

    #[test]
    fn shb_without_momentum_is_sgd_at_raw_stepsize() {
        let x0 = pv(&[1.0]);
        let gammas = [0.2, 0.3];
        let gs = [pv(&[1.0]), pv(&[-0.5])];
        let shb = reference_shb(&x0, &gammas, &gs, 0.0).unwrap();
        // beta = 0 in the SGD form divides by (1-0) = 1, same stepsizes.
        let sgd = reference_sgd(&x0, &gammas, &gs, 0.0).unwrap();
        for (a, b) in shb.iter().zip(&sgd) {
            assert!(a.sub(b).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn snag_without_momentum_is_plain_descent() {
        let x0 = pv(&[2.0]);
        let gammas = [0.5];
        let gs = [pv(&[1.0])];
        let snag = reference_snag(&x0, &gammas, &gs, 0.0).unwrap();
        assert!((snag[1][0] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn shb_hand_recursion_three_steps() {
        // beta = 0.9, gamma = 0.1, g = 1, x0 = 0:
        // m1 = -0.1, x1 = -0.1; m2 = -0.19, x2 = -0.29; m3 = -0.271, x3 = -0.561.
        let x0 = pv(&[0.0]);
        let gammas = [0.1; 3];
        let gs = [pv(&[1.0]), pv(&[1.0]), pv(&[1.0])];
        let xs = reference_shb(&x0, &gammas, &gs, 0.9).unwrap();
        assert!((xs[1][0] + 0.1).abs() < 1e-15);
        assert!((xs[2][0] + 0.29).abs() < 1e-15);
        assert!((xs[3][0] + 0.561).abs() < 1e-15);
    }

    #[test]
    fn mismatched_sequence_lengths_error() {
        let x0 = pv(&[0.0]);
        assert!(reference_sgd(&x0, &[0.1, 0.2], &[pv(&[1.0])], 0.5).is_err());
    }
}
