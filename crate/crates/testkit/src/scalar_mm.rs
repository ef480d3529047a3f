//! Scalar-state IMM and hybrid IMM, one straight-line function per cycle.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarModel {
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub q: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarBank {
    pub means: Vec<f64>,
    pub vars: Vec<f64>,
    pub belief: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarOutput {
    pub mean: f64,
    pub var: f64,
    pub selected: Option<usize>,
    pub likelihood: Vec<f64>,
}

fn kalman(model: &ScalarModel, x0: f64, p0: f64, z: f64) -> (f64, f64, f64) {
    let xp = model.f * x0;
    let pp = model.f * model.f * p0 + model.g * model.g * model.q;
    let s = model.h * model.h * pp + model.r;
    let k = pp * model.h / s;
    let nu = z - model.h * xp;
    let x = xp + k * nu;
    let p = pp - k * s * k;
    let lik = (-0.5 * nu * nu / s).exp() / (2.0 * PI * s).sqrt();
    (x, p, lik)
}

fn first_argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

/// `trans[l][j]` is the probability of moving from mode `l` to mode `j`.
pub fn imm_step(models: &[ScalarModel], trans: &[Vec<f64>], state: &ScalarBank, z: f64) -> (ScalarBank, ScalarOutput) {
    let m = models.len();
    let mu = &state.belief;
    let mut c = vec![0.0; m];
    for j in 0..m {
        for l in 0..m {
            c[j] += trans[l][j] * mu[l];
        }
    }
    let mut means = vec![0.0; m];
    let mut vars = vec![0.0; m];
    let mut lik = vec![0.0; m];
    for j in 0..m {
        let mut x0 = 0.0;
        for l in 0..m {
            x0 += trans[l][j] * mu[l] / c[j] * state.means[l];
        }
        let mut p0 = 0.0;
        for l in 0..m {
            let w = trans[l][j] * mu[l] / c[j];
            p0 += w * (state.vars[l] + (state.means[l] - x0).powi(2));
        }
        let (x, p, l) = kalman(&models[j], x0, p0, z);
        means[j] = x;
        vars[j] = p;
        lik[j] = l;
    }
    let total: f64 = (0..m).map(|j| lik[j] * c[j]).sum();
    let belief: Vec<f64> = (0..m).map(|j| lik[j] * c[j] / total).collect();
    let mean: f64 = (0..m).map(|j| belief[j] * means[j]).sum();
    let var: f64 = (0..m).map(|j| belief[j] * vars[j]).sum();
    (
        ScalarBank { means, vars, belief },
        ScalarOutput {
            mean,
            var,
            selected: None,
            likelihood: lik,
        },
    )
}

/// `trans[l][j]` is the possibility of moving from mode `l` to mode `j`.
/// Each filter adopts the mean of its most possible move-in mode and keeps
/// its own variance.
pub fn himm_step(models: &[ScalarModel], trans: &[Vec<f64>], state: &ScalarBank, z: f64) -> (ScalarBank, ScalarOutput) {
    let m = models.len();
    let pi = &state.belief;
    let mut c = vec![0.0f64; m];
    for j in 0..m {
        for l in 0..m {
            c[j] = c[j].max(trans[l][j] * pi[l]);
        }
    }
    let mut means = vec![0.0; m];
    let mut vars = vec![0.0; m];
    let mut lik = vec![0.0; m];
    for j in 0..m {
        let move_in: Vec<f64> = (0..m).map(|l| trans[l][j] * pi[l] / c[j]).collect();
        let src = first_argmax(&move_in);
        let (x, p, l) = kalman(&models[j], state.means[src], state.vars[j], z);
        means[j] = x;
        vars[j] = p;
        lik[j] = l;
    }
    let top = (0..m).map(|j| lik[j] * c[j]).fold(0.0, f64::max);
    let belief: Vec<f64> = (0..m).map(|j| lik[j] * c[j] / top).collect();
    let sel = first_argmax(&belief);
    let out = ScalarOutput {
        mean: means[sel],
        var: vars[sel],
        selected: Some(sel),
        likelihood: lik,
    };
    (ScalarBank { means, vars, belief }, out)
}
