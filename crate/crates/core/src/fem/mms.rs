//! Manufactured-solution convergence checks on the periodic unit square.

use super::assembly::{assemble_scalar, Coef, ScalarForm};
use super::element::QuadData;
use super::field::{l2_error, Field};
use super::space::{FeSpace, Topology};
use super::sparse::{Factorization, SOLVE_TOL};
use super::stokes::assemble_stokes;
use super::FemError;
use crate::mesh::{Mesh, Point};
use std::f64::consts::PI;

/// One refinement level: mesh size and L² errors.
#[derive(Debug, Clone, PartialEq)]
pub struct MmsLevel {
    pub h: f64,
    pub errors: Vec<f64>,
}

/// Least-squares slope of log(error) against log(h) for error column `k`.
pub fn fitted_order(levels: &[MmsLevel], k: usize) -> f64 {
    let xs: Vec<f64> = levels.iter().map(|l| l.h.ln()).collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.errors[k].ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn sin2(p: Point) -> f64 {
    (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin()
}

/// −Δu + u = f with u = sin 2πx sin 2πy, P2 elements.
pub fn scalar_mms(divisions: &[usize]) -> Result<Vec<MmsLevel>, FemError> {
    divisions
        .iter()
        .map(|&n| {
            let mesh = Mesh::periodic_square(n);
            let topo = Topology::new(&mesh);
            let space = FeSpace::new(&topo, &mesh, 2, false);
            let quad = QuadData::new(&mesh);
            let f = |p: Point| (8.0 * PI * PI + 1.0) * sin2(p);
            let sys = assemble_scalar(
                &mesh,
                &topo,
                &space,
                &quad,
                &ScalarForm {
                    diffusion: Coef::Const(1.0),
                    reaction: Coef::Const(1.0),
                    source: Coef::Fn(&f),
                    neumann: None,
                    zero_mean: false,
                },
            );
            let x = Factorization::cholesky(sys.matrix)?
                .solve_many(&[sys.rhs], SOLVE_TOL)?
                .remove(0);
            let u = Field { coeffs: x };
            Ok(MmsLevel {
                h: 1.0 / n as f64,
                errors: vec![l2_error(&u, &space, &quad, sin2)],
            })
        })
        .collect()
}

/// Periodic Stokes with u = (sin 2πx cos 2πy, −cos 2πx sin 2πy), p = sin 2πx sin 2πy.
/// Errors: velocity (both components combined), pressure.
pub fn stokes_mms(divisions: &[usize]) -> Result<Vec<MmsLevel>, FemError> {
    let ux = |p: Point| (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).cos();
    let uy = |p: Point| -(2.0 * PI * p[0]).cos() * (2.0 * PI * p[1]).sin();
    let fx = |p: Point| {
        8.0 * PI * PI * ux(p) + 2.0 * PI * (2.0 * PI * p[0]).cos() * (2.0 * PI * p[1]).sin()
    };
    let fy = |p: Point| {
        8.0 * PI * PI * uy(p) + 2.0 * PI * (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).cos()
    };
    divisions
        .iter()
        .map(|&n| {
            let mesh = Mesh::periodic_square(n);
            let topo = Topology::new(&mesh);
            let vs = FeSpace::new(&topo, &mesh, 2, false);
            let ps = FeSpace::new(&topo, &mesh, 1, false);
            let quad = QuadData::new(&mesh);
            let (sys, lay) = assemble_stokes(&vs, &ps, &quad, [Coef::Fn(&fx), Coef::Fn(&fy)], true);
            let pins = vec![lay.p(), lay.ux(), lay.uy()];
            let x = Factorization::bordered(sys.matrix, lay.p_mean(), pins)?
                .solve_many(&[sys.rhs], SOLVE_TOL)?
                .remove(0);
            let u0 = Field {
                coeffs: x[lay.ux()..lay.ux() + lay.nv].to_vec(),
            };
            let u1 = Field {
                coeffs: x[lay.uy()..lay.uy() + lay.nv].to_vec(),
            };
            let p = Field {
                coeffs: x[lay.p()..lay.p() + lay.np].to_vec(),
            };
            let eu = (l2_error(&u0, &vs, &quad, ux).powi(2)
                + l2_error(&u1, &vs, &quad, uy).powi(2))
            .sqrt();
            let ep = l2_error(&p, &ps, &quad, sin2);
            Ok(MmsLevel {
                h: 1.0 / n as f64,
                errors: vec![eu, ep],
            })
        })
        .collect()
}
