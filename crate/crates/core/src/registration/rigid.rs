use nalgebra::{Matrix3, Vector3, SVD};

use crate::error::RegistrationError;
use crate::geometry::RigidTransform;

/// Least-squares rigid transform `T` minimising `sum |R s + t - g|^2` over
/// `(source, target)` pairs.
///
/// Centroids are removed, the 3x3 cross-covariance is factorised by SVD and a
/// reflection is flipped back so that `det R = +1`.
pub fn estimate_rigid_transform(pairs: &[(Vector3<f64>, Vector3<f64>)]) -> Result<RigidTransform, RegistrationError> {
    if pairs.len() < 3 {
        return Err(RegistrationError::DegenerateConfiguration);
    }
    let n = pairs.len() as f64;
    let (sum_s, sum_g) = pairs
        .iter()
        .fold((Vector3::zeros(), Vector3::zeros()), |(a, b), (s, g)| (a + s, b + g));
    let cs = sum_s / n;
    let cg = sum_g / n;

    let mut cross = Matrix3::zeros();
    let mut spread = Matrix3::zeros();
    for (s, g) in pairs {
        let ds = s - cs;
        cross += ds * (g - cg).transpose();
        spread += ds * ds.transpose();
    }

    // Source points must span at least a plane.
    let mut ev: Vec<f64> = spread.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    if ev[0] <= 1e-18 || ev[1] <= 1e-12 * ev[0] {
        return Err(RegistrationError::DegenerateConfiguration);
    }

    let svd = SVD::new(cross, true, true);
    let u = svd.u.ok_or(RegistrationError::DegenerateConfiguration)?;
    let mut v = svd.v_t.ok_or(RegistrationError::DegenerateConfiguration)?.transpose();
    if (v * u.transpose()).determinant() < 0.0 {
        // nalgebra does not sort singular values; flip the column of the smallest one.
        let smallest = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(2);
        v.column_mut(smallest).neg_mut();
    }
    let rotation = v * u.transpose();
    Ok(RigidTransform {
        rotation,
        translation: cg - rotation * cs,
    })
}
