//! The quotient metric `d([x],[y]) = min_g ‖x − U_g y‖` and optimal alignment.

use serde::Serialize;

use crate::error::Result;
use crate::group::FiniteGroupAction;
use crate::linalg::{dist, norm};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentResult {
    pub distance: f64,
    /// Smallest element index attaining the minimum.
    pub aligner: usize,
    /// Every element within the alignment tolerance of the minimum.
    pub ties: Vec<usize>,
}

/// Exhaustive minimum of `‖x − U_g y‖` over the group.
pub fn quotient_distance(
    group: &FiniteGroupAction,
    x: &[f64],
    y: &[f64],
) -> Result<AlignmentResult> {
    group.check_dim(x)?;
    group.check_dim(y)?;
    let mut buf = vec![0.0; group.dim()];
    let dists: Vec<f64> = (0..group.order())
        .map(|g| {
            group.apply_into(g, y, &mut buf);
            dist(x, &buf)
        })
        .collect();
    let (aligner, distance) = dists
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (g, d)| if d < best.1 { (g, d) } else { best });
    let slack = group.tolerances().align * (norm(x) + norm(y)).max(1.0);
    let ties = dists
        .iter()
        .enumerate()
        .filter(|(_, &d)| d <= distance + slack)
        .map(|(g, _)| g)
        .collect();
    Ok(AlignmentResult {
        distance,
        aligner,
        ties,
    })
}

/// `d([x],[y]) ≤ tol · max(1, ‖x‖)`.
pub fn is_equivalent(group: &FiniteGroupAction, x: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    let a = quotient_distance(group, x, y)?;
    Ok(a.distance <= tol * norm(x).max(1.0))
}

/// Quotient distance only.
pub fn distance(group: &FiniteGroupAction, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(quotient_distance(group, x, y)?.distance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn build(spec: GroupSpec) -> FiniteGroupAction {
        FiniteGroupAction::build(&spec).unwrap()
    }

    #[test]
    fn identical_points_align_with_identity() {
        let g = build(GroupSpec::Cyclic { n: 4 });
        let x = [0.2, -1.0, 3.0, 0.5];
        let a = quotient_distance(&g, &x, &x).unwrap();
        assert_eq!(a.distance, 0.0);
        assert_eq!(a.aligner, 0);
    }

    #[test]
    fn swap_aligns_basis_vectors() {
        let g = build(GroupSpec::Cyclic { n: 2 });
        let a = quotient_distance(&g, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(a.distance, 0.0);
        assert_eq!(a.aligner, 1);
        assert!(is_equivalent(&g, &[1.0, 0.0], &[0.0, 1.0], 1e-9).unwrap());
    }

    #[test]
    fn scalar_sign_flip_distance() {
        let g = build(GroupSpec::SignFlips { d: 1 });
        let a = quotient_distance(&g, &[2.0], &[-3.0]).unwrap();
        assert_eq!(a.distance, 1.0);
        assert_eq!(a.aligner, 1);
        assert!(!is_equivalent(&g, &[2.0], &[3.0], 1e-9).unwrap());
    }

    #[test]
    fn orbit_points_are_equivalent() {
        let g = build(GroupSpec::Dihedral { n: 5 });
        let x = [0.3, 1.7, -0.4, 2.2, 0.0];
        for h in 0..g.order() {
            let y = g.apply(h, &x).unwrap();
            assert!(is_equivalent(&g, &x, &y, 1e-12).unwrap());
        }
    }

    #[test]
    fn ties_collect_every_minimizer() {
        let g = build(GroupSpec::Cyclic { n: 4 });
        let a = quotient_distance(&g, &[1.0; 4], &[1.0; 4]).unwrap();
        assert_eq!(a.ties, vec![0, 1, 2, 3]);
    }
}
