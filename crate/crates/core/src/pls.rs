//! PLS1 reduction of a feature matrix against a binary response (NIPALS).
//!
//! Columns are z-scored (zero-variance columns are dropped and recorded),
//! the response is centered, and each component takes the unit weight
//! `w ∝ Xᵀy` of the deflated data, its score `t = Xw`, and deflates `X` and
//! `y` by regression on `t`. New data is projected with the rotation
//! `R = W (PᵀW)⁻¹`, which reproduces the training scores without deflation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

/// What [`PlsModel::transform`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlsOutput {
    /// The `A` latent scores.
    #[default]
    Latent,
    /// The `A` standardized original columns with the largest VIP.
    Vip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlsModel {
    pub n_components: usize,
    pub output: PlsOutput,
    /// Retained input columns, in input order.
    pub feature_names: Vec<String>,
    /// Zero-variance columns removed before fitting.
    pub dropped: Vec<String>,
    pub column_means: Vec<f64>,
    pub column_sds: Vec<f64>,
    pub y_mean: f64,
    /// Component-major: `weights[a]` has one entry per retained column.
    pub weights: Vec<Vec<f64>>,
    pub loadings: Vec<Vec<f64>>,
    pub y_loadings: Vec<f64>,
    pub rotations: Vec<Vec<f64>>,
    /// Variable importance in projection, one per retained column.
    pub vip: Vec<f64>,
    /// Retained-column indices picked in [`PlsOutput::Vip`] mode.
    pub vip_selected: Vec<usize>,
}

/// A fitted model plus training-side diagnostics.
#[derive(Debug, Clone)]
pub struct PlsFit {
    pub model: PlsModel,
    /// Training scores `T` (n × A).
    pub scores: FeatureMatrix,
    /// Frobenius norm of the standardized `X` after all deflations.
    pub residual_norm: f64,
}

const SD_FLOOR: f64 = 1e-12;

fn to_dmatrix(x: &FeatureMatrix, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.n_rows(), cols.len(), |i, j| x.get(i, cols[j]))
}

/// Dominant right singular direction of `x` by power iteration.
fn dominant_direction(x: &DMatrix<f64>) -> Option<DVector<f64>> {
    let xtx = x.transpose() * x;
    let start = (0..xtx.ncols()).max_by(|&a, &b| xtx[(a, a)].total_cmp(&xtx[(b, b)]))?;
    let mut v = DVector::from_fn(xtx.ncols(), |i, _| if i == start { 1.0 } else { 0.0 });
    for _ in 0..500 {
        let next = &xtx * &v;
        let norm = next.norm();
        if norm <= f64::EPSILON {
            return None;
        }
        let next = next / norm;
        let done = (&next - &v).norm() < 1e-13;
        v = next;
        if done {
            break;
        }
    }
    Some(v)
}

fn sign_fix(w: &mut DVector<f64>) {
    let imax = w.iamax();
    if w[imax] < 0.0 {
        w.neg_mut();
    }
}

pub fn fit_pls(x: &FeatureMatrix, y: &[f64], n_components: usize) -> Result<PlsModel> {
    fit_pls_detailed(x, y, n_components, PlsOutput::Latent).map(|f| f.model)
}

pub fn fit_pls_detailed(
    x: &FeatureMatrix,
    y: &[f64],
    n_components: usize,
    output: PlsOutput,
) -> Result<PlsFit> {
    let n = x.n_rows();
    if y.len() != n {
        return Err(Error::Shape(format!("{} labels for {n} rows", y.len())));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("PLS needs at least 2 samples".into()));
    }
    if !x.is_finite() || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite PLS input".into()));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::SingleClass);
    }
    if n_components == 0 {
        return Err(Error::InvalidArgument("PLS needs at least one component".into()));
    }

    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    let mut means = Vec::new();
    let mut sds = Vec::new();
    for j in 0..x.n_cols() {
        let col = x.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        if sd > SD_FLOOR * mean.abs().max(1.0) {
            keep.push(j);
            means.push(mean);
            sds.push(sd);
        } else {
            dropped.push(x.names()[j].clone());
        }
    }
    if !dropped.is_empty() {
        log::info!("PLS dropped {} zero-variance columns", dropped.len());
    }
    let p = keep.len();
    if p == 0 {
        return Err(Error::InvalidArgument("every feature column is constant".into()));
    }
    if n_components > p.min(n - 1) {
        return Err(Error::InvalidArgument(format!(
            "{n_components} components requested but at most min(n-1, p) = {} possible",
            p.min(n - 1)
        )));
    }

    let mut xa = to_dmatrix(x, &keep);
    for j in 0..p {
        let (m, s) = (means[j], sds[j]);
        xa.column_mut(j).apply(|v| *v = (*v - m) / s);
    }
    let x0 = xa.clone();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut ya = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
    let y_ss = ya.norm_squared();

    let mut w_mat = DMatrix::zeros(p, n_components);
    let mut p_mat = DMatrix::zeros(p, n_components);
    let mut t_mat = DMatrix::zeros(n, n_components);
    let mut q = Vec::with_capacity(n_components);
    let x_scale = x0.norm().max(1.0);
    for a in 0..n_components {
        let mut w = xa.transpose() * &ya;
        let norm = w.norm();
        if norm > 1e-10 * x_scale * y_ss.sqrt().max(1.0) {
            w /= norm;
        } else {
            // The response is exhausted; continue along the largest remaining
            // variance direction so the scores stay orthogonal.
            w = dominant_direction(&xa).ok_or_else(|| {
                Error::InvalidArgument(format!("X has rank below the {n_components} requested components"))
            })?;
        }
        sign_fix(&mut w);
        let t = &xa * &w;
        let tt = t.norm_squared();
        if tt <= 1e-20 * x_scale * x_scale {
            return Err(Error::InvalidArgument(format!(
                "X has rank {a}, below the {n_components} requested components"
            )));
        }
        let load = xa.transpose() * &t / tt;
        let qa = ya.dot(&t) / tt;
        xa -= &t * load.transpose();
        ya -= &t * qa;
        w_mat.set_column(a, &w);
        p_mat.set_column(a, &load);
        t_mat.set_column(a, &t);
        q.push(qa);
    }

    let ptw = p_mat.transpose() * &w_mat;
    let inv = ptw
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("singular PᵀW in PLS rotation".into()))?;
    let rot = &w_mat * inv;

    // VIP_j = sqrt(p · Σ_a SSY_a w_ja² / Σ_a SSY_a), SSY_a = q_a² t_aᵀt_a.
    let ssy: Vec<f64> = (0..n_components)
        .map(|a| q[a] * q[a] * t_mat.column(a).norm_squared())
        .collect();
    let ssy_total: f64 = ssy.iter().sum();
    let vip: Vec<f64> = (0..p)
        .map(|j| {
            let s: f64 = (0..n_components).map(|a| ssy[a] * w_mat[(j, a)].powi(2)).sum();
            if ssy_total > 0.0 {
                (p as f64 * s / ssy_total).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| vip[b].total_cmp(&vip[a]).then(a.cmp(&b)));
    let mut vip_selected: Vec<usize> = order[..n_components].to_vec();
    vip_selected.sort_unstable();

    let cols = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
        m.column_iter().map(|c| c.iter().copied().collect()).collect()
    };
    let feature_names: Vec<String> = keep.iter().map(|&j| x.names()[j].clone()).collect();
    let model = PlsModel {
        n_components,
        output,
        feature_names,
        dropped,
        column_means: means,
        column_sds: sds,
        y_mean,
        weights: cols(&w_mat),
        loadings: cols(&p_mat),
        y_loadings: q,
        rotations: cols(&rot),
        vip,
        vip_selected,
    };
    let score_rows: Vec<Vec<f64>> = t_mat.row_iter().map(|r| r.iter().copied().collect()).collect();
    let scores = FeatureMatrix::from_rows(model.output_names(), &score_rows)?;
    let scores = match output {
        PlsOutput::Latent => scores,
        PlsOutput::Vip => model.transform(x)?,
    };
    Ok(PlsFit {
        model,
        scores,
        residual_norm: xa.norm(),
    })
}

impl PlsModel {
    pub fn output_names(&self) -> Vec<String> {
        match self.output {
            PlsOutput::Latent => (1..=self.n_components).map(|a| format!("pls_{a}")).collect(),
            PlsOutput::Vip => self
                .vip_selected
                .iter()
                .map(|&j| self.feature_names[j].clone())
                .collect(),
        }
    }

    /// Projects new rows; columns are matched by name.
    pub fn transform(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        let idx = self
            .feature_names
            .iter()
            .map(|name| {
                x.column_index(name)
                    .ok_or_else(|| Error::ColumnMismatch(format!("missing column `{name}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if !x.is_finite() {
            return Err(Error::InvalidArgument("non-finite input to PLS transform".into()));
        }
        let mut out = Vec::with_capacity(x.n_rows() * self.n_components);
        let mut z = vec![0.0; idx.len()];
        for row in x.rows() {
            for (k, &j) in idx.iter().enumerate() {
                z[k] = (row[j] - self.column_means[k]) / self.column_sds[k];
            }
            match self.output {
                PlsOutput::Latent => out.extend(
                    self.rotations
                        .iter()
                        .map(|r| r.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>()),
                ),
                PlsOutput::Vip => out.extend(self.vip_selected.iter().map(|&j| z[j])),
            }
        }
        FeatureMatrix::new(self.output_names(), x.n_rows(), out)
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("PLS model serializes");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
