use super::{ModelSpec, COLLISION_GUARD};
use crate::error::{Error, Result};
use crate::geometry::LineState;

/// Accelerations `z̈` of the line models the tan kinds are transcribed
/// from:
///
/// * isochronous: `z̈_n = −4 z_n + g² Σ_{ℓ≠n} (z_n − z_ℓ)^{-3}`
/// * goldfish: `z̈_n = −z_n + Σ_{ℓ≠n} (2 ż_n ż_ℓ + 1)/(z_n − z_ℓ)`
pub fn rhs_line(model: &ModelSpec, l: &LineState) -> Result<Vec<f64>> {
    let (z, zd) = (l.z(), l.z_dot());
    let n = z.len();
    for a in 0..n {
        for b in a + 1..n {
            let separation = (z[a] - z[b]).abs();
            if separation <= COLLISION_GUARD {
                return Err(Error::CollisionSingularity {
                    first: a,
                    second: b,
                    separation,
                });
            }
        }
    }
    let others = |i: usize| (0..n).filter(move |&k| k != i);
    match model {
        ModelSpec::IsochronousTan { g } => Ok((0..n)
            .map(|i| {
                let sum: f64 = others(i).map(|k| (z[i] - z[k]).powi(-3)).sum();
                -4.0 * z[i] + g * g * sum
            })
            .collect()),
        ModelSpec::GoldfishTan => Ok((0..n)
            .map(|i| {
                let sum: f64 = others(i)
                    .map(|k| (2.0 * zd[i] * zd[k] + 1.0) / (z[i] - z[k]))
                    .sum();
                -z[i] + sum
            })
            .collect()),
        _ => Err(model.wrong_kind("isochronous_tan or goldfish_tan")),
    }
}
