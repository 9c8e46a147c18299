//! Independent reference implementations used by the integration suites.
#![allow(dead_code)]

use radiomics_crbm::radiomics::QuantizedImage;
use radiomics_crbm::CrbmModel;

/// A CRBM written out as an ordinary RBM with an explicit `n_v × n_h`
/// weight matrix; hidden unit `(m, i, j)` sees visible `(i + a, j + b)`
/// through `W_m[a][b]`.
pub struct DenseRbm {
    pub n_v: usize,
    pub n_h: usize,
    pub w: Vec<f64>,
    pub b: f64,
    pub c: Vec<f64>,
}

impl DenseRbm {
    pub fn unroll(model: &CrbmModel) -> Self {
        let (n, k, m) = (model.input_size(), model.kernel_size(), model.num_filters());
        let h = n - k + 1;
        let n_v = n * n;
        let n_h = m * h * h;
        let mut w = vec![0.0; n_v * n_h];
        let mut c = vec![0.0; n_h];
        for f in 0..m {
            for i in 0..h {
                for j in 0..h {
                    let hid = f * h * h + i * h + j;
                    c[hid] = model.hidden_biases[f];
                    for a in 0..k {
                        for bb in 0..k {
                            let vis = (i + a) * n + (j + bb);
                            w[vis * n_h + hid] = model.filters[f * k * k + a * k + bb];
                        }
                    }
                }
            }
        }
        Self { n_v, n_h, w, b: model.visible_bias, c }
    }

    /// `Wᵀv + c`.
    pub fn hidden_input(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n_h)
            .map(|j| self.c[j] + (0..self.n_v).map(|i| v[i] * self.w[i * self.n_h + j]).sum::<f64>())
            .collect()
    }

    /// `Wh + b`.
    pub fn visible_input(&self, h: &[f64]) -> Vec<f64> {
        (0..self.n_v)
            .map(|i| self.b + (0..self.n_h).map(|j| h[j] * self.w[i * self.n_h + j]).sum::<f64>())
            .collect()
    }

    pub fn energy(&self, v: &[f64], h: &[f64]) -> f64 {
        let mut e = -self.b * v.iter().sum::<f64>();
        for j in 0..self.n_h {
            e -= self.c[j] * h[j];
            for i in 0..self.n_v {
                e -= v[i] * self.w[i * self.n_h + j] * h[j];
            }
        }
        e
    }

    /// `log Σ_h exp(-E(v, h))` over all `2^n_h` hidden configurations.
    pub fn log_unnormalized_marginal(&self, v: &[f64]) -> f64 {
        let a = self.hidden_input(v);
        let vb = self.b * v.iter().sum::<f64>();
        let terms: Vec<f64> = (0..1u64 << self.n_h)
            .map(|bits| {
                let mut s = vb;
                for (j, aj) in a.iter().enumerate() {
                    if bits >> j & 1 == 1 {
                        s += aj;
                    }
                }
                s
            })
            .collect();
        log_sum_exp(&terms)
    }

    /// `log Σ_v Σ_h exp(-E(v, h))` by full joint enumeration.
    pub fn log_partition_joint(&self) -> f64 {
        let terms: Vec<f64> = (0..1u64 << self.n_v)
            .map(|bits| self.log_unnormalized_marginal(&bits_to_config(bits, self.n_v)))
            .collect();
        log_sum_exp(&terms)
    }
}

pub fn bits_to_config(bits: u64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (bits >> i & 1) as f64).collect()
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// GLCM probabilities from every ordered pair of in-ROI positions whose
/// displacement equals `offset`.
pub fn brute_glcm(q: &QuantizedImage, offset: (isize, isize), symmetric: bool) -> Vec<f64> {
    let l = q.levels;
    let pos: Vec<(isize, isize, usize)> = (0..q.height)
        .flat_map(|r| (0..q.width).map(move |c| (r, c)))
        .filter_map(|(r, c)| {
            let code = q.codes[r * q.width + c];
            (code > 0).then_some((r as isize, c as isize, code as usize))
        })
        .collect();
    let mut counts = vec![0.0; l * l];
    let mut total = 0.0;
    for &(r1, c1, g1) in &pos {
        for &(r2, c2, g2) in &pos {
            if (r2 - r1, c2 - c1) == offset {
                counts[(g1 - 1) * l + (g2 - 1)] += 1.0;
                total += 1.0;
                if symmetric {
                    counts[(g2 - 1) * l + (g1 - 1)] += 1.0;
                    total += 1.0;
                }
            }
        }
    }
    counts.iter().map(|c| c / total).collect()
}

/// Run counts indexed `[level - 1][len - 1]`: walk every full line of the
/// raster along `dir` and split it into maximal runs of one in-ROI level.
pub fn brute_glrlm(q: &QuantizedImage, dir: (isize, isize)) -> Vec<u64> {
    let (w, h) = (q.width as isize, q.height as isize);
    let max_run = q.width.max(q.height);
    let inside = |r: isize, c: isize| r >= 0 && c >= 0 && r < h && c < w;
    let mut counts = vec![0u64; q.levels * max_run];
    for r0 in 0..h {
        for c0 in 0..w {
            if inside(r0 - dir.0, c0 - dir.1) {
                continue; // not the first pixel of its line
            }
            let mut line = Vec::new();
            let (mut r, mut c) = (r0, c0);
            while inside(r, c) {
                line.push(q.codes[(r * w + c) as usize]);
                r += dir.0;
                c += dir.1;
            }
            let mut i = 0;
            while i < line.len() {
                let mut j = i;
                while j < line.len() && line[j] == line[i] {
                    j += 1;
                }
                if line[i] > 0 {
                    counts[(line[i] as usize - 1) * max_run + (j - i - 1)] += 1;
                }
                i = j;
            }
        }
    }
    counts
}

/// GLCM features from a probability matrix, via marginal distributions.
pub fn glcm_reference_features(p: &[f64], l: usize) -> [f64; 8] {
    let at = |i: usize, j: usize| p[(i - 1) * l + (j - 1)];
    let px: Vec<f64> = (1..=l).map(|i| (1..=l).map(|j| at(i, j)).sum()).collect();
    let py: Vec<f64> = (1..=l).map(|j| (1..=l).map(|i| at(i, j)).sum()).collect();
    let mx: f64 = px.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum();
    let my: f64 = py.iter().enumerate().map(|(j, p)| (j + 1) as f64 * p).sum();
    let vx: f64 = px.iter().enumerate().map(|(i, p)| ((i + 1) as f64 - mx).powi(2) * p).sum();
    let vy: f64 = py.iter().enumerate().map(|(j, p)| ((j + 1) as f64 - my).powi(2) * p).sum();
    let mut f = [0.0; 8];
    let mut cov = 0.0;
    for i in 1..=l {
        for j in 1..=l {
            let v = at(i, j);
            let d = i as f64 - j as f64;
            f[0] += d * d * v;
            f[1] += d.abs() * v;
            f[2] += v / (1.0 + d * d);
            f[3] += v * v;
            if v > 0.0 {
                f[4] -= v * v.log2();
            }
            cov += (i as f64 - mx) * (j as f64 - my) * v;
            f[6] += (i as f64 + j as f64 - mx - my).powi(3) * v;
            f[7] += (i as f64 + j as f64 - mx - my).powi(4) * v;
        }
    }
    f[5] = if vx * vy > 1e-24 { cov / (vx * vy).sqrt() } else { 0.0 };
    f
}

/// SRE, LRE, GLN, RLN, RP, LGRE, HGRE from run counts.
pub fn glrlm_reference_features(counts: &[u64], levels: usize, max_run: usize) -> [f64; 7] {
    let mut runs = Vec::new(); // (level, len) once per run
    for g in 1..=levels {
        for len in 1..=max_run {
            for _ in 0..counts[(g - 1) * max_run + len - 1] {
                runs.push((g as f64, len as f64));
            }
        }
    }
    let n = runs.len() as f64;
    let pixels: f64 = runs.iter().map(|r| r.1).sum();
    let gln: f64 = (1..=levels)
        .map(|g| runs.iter().filter(|r| r.0 == g as f64).count() as f64)
        .map(|c| c * c)
        .sum();
    let rln: f64 = (1..=max_run)
        .map(|len| runs.iter().filter(|r| r.1 == len as f64).count() as f64)
        .map(|c| c * c)
        .sum();
    [
        runs.iter().map(|r| 1.0 / (r.1 * r.1)).sum::<f64>() / n,
        runs.iter().map(|r| r.1 * r.1).sum::<f64>() / n,
        gln / n,
        rln / n,
        n / pixels,
        runs.iter().map(|r| 1.0 / (r.0 * r.0)).sum::<f64>() / n,
        runs.iter().map(|r| r.0 * r.0).sum::<f64>() / n,
    ]
}

/// Five small quantized rasters with ROI holes, ties and several levels.
pub fn texture_fixtures() -> Vec<QuantizedImage> {
    let raw: [(usize, usize, usize, &[u16]); 5] = [
        (3, 3, 3, &[1, 2, 3, 2, 2, 1, 3, 1, 1]),
        (4, 4, 2, &[1, 2, 1, 2, 2, 1, 2, 1, 1, 2, 1, 2, 2, 1, 2, 1]),
        (5, 3, 4, &[0, 1, 1, 2, 0, 4, 4, 1, 2, 3, 0, 3, 3, 3, 0]),
        (4, 5, 3, &[1, 1, 1, 1, 2, 0, 0, 2, 3, 3, 2, 2, 1, 0, 3, 3, 1, 1, 1, 2]),
        (6, 4, 5, &[5, 5, 4, 0, 1, 1, 5, 4, 4, 3, 2, 1, 0, 3, 3, 3, 2, 0, 1, 2, 3, 4, 5, 5]),
    ];
    raw.iter()
        .map(|&(w, h, l, codes)| QuantizedImage::from_codes(w, h, l, codes.to_vec()).unwrap())
        .collect()
}

/// Fraction of (positive, negative) pairs ordered correctly, ties counting 1/2.
pub fn auc_pairs(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            den += 1.0;
            num += if si > sj {
                1.0
            } else if si == sj {
                0.5
            } else {
                0.0
            };
        }
    }
    num / den
}

pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
