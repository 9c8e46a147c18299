//! Valid cross-correlation and its adjoint on square, row-major buffers.
//!
//! Loops are ordered so the innermost operation is an axpy over a contiguous
//! row slice, which the compiler vectorizes.

/// `out[i,j] += Σ_{r,s} filter[r,s] · input[i+r, j+s]` for an `n`×`n` input and
/// `k`×`k` filter; `out` is `(n-k+1)`² and is accumulated into.
pub fn correlate_valid_acc(input: &[f64], n: usize, filter: &[f64], k: usize, out: &mut [f64]) {
    let h = n - k + 1;
    debug_assert_eq!(input.len(), n * n);
    debug_assert_eq!(filter.len(), k * k);
    debug_assert_eq!(out.len(), h * h);
    for r in 0..k {
        for s in 0..k {
            let w = filter[r * k + s];
            if w == 0.0 {
                continue;
            }
            for i in 0..h {
                let src = &input[(i + r) * n + s..(i + r) * n + s + h];
                let dst = &mut out[i * h..(i + 1) * h];
                for (d, &x) in dst.iter_mut().zip(src) {
                    *d += w * x;
                }
            }
        }
    }
}

/// Full convolution with the unflipped filter, the adjoint of
/// [`correlate_valid_acc`]: `out[p+r, q+s] += filter[r,s] · hidden[p,q]`.
/// `hidden` is `h`×`h`, `out` is `n`×`n` with `n = h + k - 1`.
pub fn backproject_acc(hidden: &[f64], h: usize, filter: &[f64], k: usize, out: &mut [f64]) {
    let n = h + k - 1;
    debug_assert_eq!(hidden.len(), h * h);
    debug_assert_eq!(out.len(), n * n);
    for r in 0..k {
        for s in 0..k {
            let w = filter[r * k + s];
            if w == 0.0 {
                continue;
            }
            for p in 0..h {
                let src = &hidden[p * h..(p + 1) * h];
                let dst = &mut out[(p + r) * n + s..(p + r) * n + s + h];
                for (d, &x) in dst.iter_mut().zip(src) {
                    *d += w * x;
                }
            }
        }
    }
}

/// Filter-shaped correlation `grad[r,s] += Σ_{i,j} hidden[i,j] · input[i+r, j+s]`.
pub fn filter_gradient_acc(input: &[f64], n: usize, hidden: &[f64], k: usize, grad: &mut [f64]) {
    let h = n - k + 1;
    debug_assert_eq!(hidden.len(), h * h);
    debug_assert_eq!(grad.len(), k * k);
    for r in 0..k {
        for s in 0..k {
            let mut acc = 0.0;
            for i in 0..h {
                let src = &input[(i + r) * n + s..(i + r) * n + s + h];
                let hr = &hidden[i * h..(i + 1) * h];
                acc += src.iter().zip(hr).map(|(a, b)| a * b).sum::<f64>();
            }
            grad[r * k + s] += acc;
        }
    }
}
