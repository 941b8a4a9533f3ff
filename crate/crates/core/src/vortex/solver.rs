//! Damped metric flow for the vortex equations.
//!
//! Each step moves log hᵢ against √−1Rᵢ in the unitary frame gᵢ = hᵢ^{1/2}:
//! hᵢ ← gᵢ exp(−ε P(gᵢ√−1Rᵢgᵢ⁻¹)) gᵢ, where P = (1 − εcΔ)⁻¹ is applied
//! spectrally. The step size is chosen by backtracking on the sup residual,
//! and both metrics are rescaled by a common constant so that the grid mean
//! of tr log h₁ + tr log h₂ vanishes.

use super::residual::{residual, VortexResidual};
use super::VortexConstants;
use crate::geometry::{Field, FormType};
use crate::higgs::{MetricPair, QuadrupletSpec};
use crate::linalg;
use crate::rng;
use crate::{CMat, Error, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    /// Initial step size ε.
    pub step: f64,
    /// Coefficient c of the preconditioner (1 − εcΔ)⁻¹.
    pub damping: f64,
    pub max_iter: usize,
    pub target_residual: f64,
    /// Window (accepted iterations) used to detect stagnation.
    pub patience: usize,
    /// Minimum relative decrease of the residual over the window.
    pub min_progress: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Rescale (h₁, h₂) jointly after each step.
    pub normalize: bool,
    /// Amplitude of the seeded smooth perturbation of the initial metrics.
    pub init_perturbation: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            step: 0.05,
            damping: 0.5,
            max_iter: 5000,
            target_residual: 1e-8,
            patience: 50,
            min_progress: 1e-3,
            min_step: 1e-10,
            max_step: 1.0,
            normalize: true,
            init_perturbation: 0.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    /// Residual stopped decreasing over the patience window.
    Stagnated,
    MaxIterations,
    /// Backtracking could not find a decreasing step.
    StepCollapse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub sup_r1: f64,
    pub sup_r2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub converged: bool,
    pub iterations: usize,
    pub final_sup_r1: f64,
    pub final_sup_r2: f64,
    pub final_step: f64,
    pub history: Vec<HistoryRow>,
}

fn mask_blocks(m: &mut CMat, degrees: &[i64]) {
    for (a, da) in degrees.iter().enumerate() {
        for (b, db) in degrees.iter().enumerate() {
            if da != db {
                m[(a, b)] = C64::new(0.0, 0.0);
            }
        }
    }
}

/// Initial metrics: identity, or exp of a seeded smooth Hermitian field.
pub fn initial_metrics(q: &QuadrupletSpec, opts: &SolveOptions) -> MetricPair {
    if opts.init_perturbation == 0.0 {
        return MetricPair::identity(&q.grid, q.r1(), q.r2());
    }
    let mut r = rng::seeded(opts.seed);
    let mut make = |deg: &[i64]| {
        let s = rng::band_limited(&mut r, &q.grid, deg.len(), deg.len(), 2, opts.init_perturbation, |r| {
            let mut m = rng::hermitian(r, deg.len());
            mask_blocks(&mut m, deg);
            m
        });
        s.map(FormType::Function, linalg::herm_exp)
    };
    let h1 = make(&q.e1_degrees);
    let h2 = make(&q.e2_degrees);
    MetricPair { h1, h2 }
}

fn objective(res: &VortexResidual, h: &MetricPair) -> Result<(f64, f64)> {
    res.sup_norms(h)
}

fn update_metric(q: &QuadrupletSpec, h: &Field, r: &Field, eps: f64, damping: f64) -> Result<Field> {
    let grid = &q.grid;
    let pairs: Result<Vec<(CMat, CMat)>> = h
        .values
        .par_iter()
        .zip(r.values.par_iter())
        .map(|(hm, rm)| {
            let g = linalg::herm_sqrt(hm)?;
            let gi = linalg::herm_inv_sqrt(hm)?;
            let x = linalg::hermitian_part(&(&g * (rm * C64::new(0.0, 1.0)) * gi));
            Ok((g, x))
        })
        .collect();
    let (gs, xs): (Vec<CMat>, Vec<CMat>) = pairs?.into_iter().unzip();
    let x = Field { values: xs, ..h.clone() };
    let cd = eps * damping;
    let smoothed = grid.apply_multiplier(&x, |kx, ky, _, _| {
        let lap = -4.0 * PI * PI * (kx * kx + ky * ky);
        C64::new(-eps / (1.0 - cd * lap), 0.0)
    });
    let values: Vec<CMat> = gs
        .par_iter()
        .zip(smoothed.par_iter())
        .map(|(g, d)| g * linalg::herm_exp(&linalg::hermitian_part(d)) * g)
        .collect();
    Ok(Field { values, ..h.clone() })
}

fn normalize(h: &mut MetricPair) -> Result<()> {
    let total_rank = (h.h1.rows + h.h2.rows) as f64;
    let mut acc = 0.0;
    for f in [&h.h1, &h.h2] {
        for m in &f.values {
            acc += linalg::herm_log(m)?.trace().re;
        }
    }
    let mean = acc / (h.h1.len() as f64 * total_rank);
    let s = C64::new((-mean).exp(), 0.0);
    h.h1 = h.h1.scale(s);
    h.h2 = h.h2.scale(s);
    Ok(())
}

/// Solve from the configured initial metrics.
pub fn solve(q: &QuadrupletSpec, c: &VortexConstants, opts: &SolveOptions) -> Result<(MetricPair, SolveReport)> {
    let h0 = initial_metrics(q, opts);
    solve_from(q, c, h0, opts)
}

/// Solve starting at `h0`. Nonconvergence is reported in the returned
/// [`SolveReport`] together with the best iterate; it is not an error.
pub fn solve_from(
    q: &QuadrupletSpec,
    c: &VortexConstants,
    h0: MetricPair,
    opts: &SolveOptions,
) -> Result<(MetricPair, SolveReport)> {
    if !(opts.step > 0.0 && opts.target_residual > 0.0 && opts.damping >= 0.0) {
        return Err(Error::Invalid("solver options must be positive".into()));
    }
    let mut h = h0;
    let mut res = residual(q, &h, c)?;
    let (mut s1, mut s2) = objective(&res, &h)?;
    let mut history = vec![HistoryRow { iteration: 0, sup_r1: s1, sup_r2: s2 }];
    let mut eps = opts.step;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;

    for it in 1..=opts.max_iter {
        let cur = s1.max(s2);
        if cur <= opts.target_residual {
            status = SolveStatus::Converged;
            break;
        }
        let mut accepted = None;
        while eps >= opts.min_step {
            let mut trial = MetricPair {
                h1: update_metric(q, &h.h1, &res.r1, eps, opts.damping)?,
                h2: update_metric(q, &h.h2, &res.r2, eps, opts.damping)?,
            };
            if opts.normalize {
                normalize(&mut trial)?;
            }
            let tres = residual(q, &trial, c)?;
            let (t1, t2) = objective(&tres, &trial)?;
            if t1.max(t2) <= cur {
                accepted = Some((trial, tres, t1, t2));
                break;
            }
            eps *= 0.5;
        }
        let Some((nh, nres, t1, t2)) = accepted else {
            status = SolveStatus::StepCollapse;
            break;
        };
        h = nh;
        res = nres;
        s1 = t1;
        s2 = t2;
        iterations = it;
        eps = (eps * 1.1).min(opts.max_step);
        history.push(HistoryRow { iteration: it, sup_r1: s1, sup_r2: s2 });

        if s1.max(s2) <= opts.target_residual {
            status = SolveStatus::Converged;
            break;
        }
        if history.len() > opts.patience {
            let old = &history[history.len() - 1 - opts.patience];
            let before = old.sup_r1.max(old.sup_r2);
            if s1.max(s2) > (1.0 - opts.min_progress) * before {
                status = SolveStatus::Stagnated;
                break;
            }
        }
    }
    if history.len() == 1 && s1.max(s2) <= opts.target_residual {
        status = SolveStatus::Converged;
    }
    let report = SolveReport {
        status,
        converged: status == SolveStatus::Converged,
        iterations,
        final_sup_r1: s1,
        final_sup_r2: s2,
        final_step: eps,
        history,
    };
    Ok((h, report))
}
