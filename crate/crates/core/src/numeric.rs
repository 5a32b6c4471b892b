//! Small numerical kernels: adaptive quadrature, bracketed root finding and
//! finite-difference stencils.

use crate::error::{Error, Result};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for j in 0..7 {
        let x = h * GK_NODES[j];
        let s = f(c - x) + f(c + x);
        kronrod += GK_WEIGHTS[j] * s;
        if j % 2 == 1 {
            gauss += G_WEIGHTS[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]` to the
/// given absolute tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (val, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 || (b - a).abs() < 1e-14 {
            return val;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth + 1) + recurse(f, m, b, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    recurse(&f, a, b, abs_tol, 0)
}

/// Bisection on a sign-change bracket, iterated to the floating-point limit.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(if f(lo).abs() <= f(hi).abs() { lo } else { hi })
}

/// Newton iteration safeguarded by a bracket. `fd` returns value and
/// derivative; the bracket must satisfy `f(lo) < 0 < f(hi)`.
pub fn newton_bisect(
    fd: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    tol: f64,
) -> f64 {
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let (g, dg) = fd(x);
        if g == 0.0 {
            return x;
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = if dg > 0.0 { x - g / dg } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= tol * (1.0 + x.abs()) || hi - lo <= tol * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

/// Fourth-order central first derivative from samples at `-2h..2h`.
#[inline]
pub fn d1_central4(fm2: f64, fm1: f64, fp1: f64, fp2: f64, h: f64) -> f64 {
    (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h)
}

/// Fourth-order central second derivative from samples at `-2h..2h`.
#[inline]
pub fn d2_central4(fm2: f64, fm1: f64, f0: f64, fp1: f64, fp2: f64, h: f64) -> f64 {
    (16.0 * ((fm1 - f0) + (fp1 - f0)) - ((fm2 - f0) + (fp2 - f0))) / (12.0 * h * h)
}

/// Finite-difference weights for derivatives of order `0..=m` at `x0` from
/// arbitrary distinct nodes (Fornberg's recursion). Returns `w[k][j]`, the
/// weight of node `j` for the `k`-th derivative.
pub fn fornberg_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
