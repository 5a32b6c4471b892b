//! Dormand–Prince 5(4) embedded Runge–Kutta pair.

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (equal to the last row of `A`).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Difference between fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Result of one trial step.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Trial<const N: usize, D> {
    pub y: [f64; N],
    /// Derivative at the new point, reusable as the next first stage.
    pub k_last: [f64; N],
    pub data_last: D,
    /// Weighted RMS error estimate; the step is acceptable when `<= 1`.
    pub err: f64,
}

/// Performs one step of size `h` from `(s, y)` with first stage `k1`.
/// `f` returns the derivative together with auxiliary data at the point.
pub(crate) fn step<const N: usize, D, X>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<([f64; N], D), X>,
    s: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    rtol: f64,
    atol: f64,
) -> Result<Trial<N, D>, X> {
    let mut k = [[0.0; N]; 7];
    k[0] = *k1;
    let mut data_last = None;
    for stage in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage][j];
            if a != 0.0 {
                for d in 0..N {
                    yi[d] += h * a * kj[d];
                }
            }
        }
        let (dy, data) = f(s + C[stage] * h, &yi)?;
        k[stage] = dy;
        if stage == 6 {
            data_last = Some(data);
        }
    }
    let mut y_new = *y;
    let mut acc = 0.0;
    for d in 0..N {
        let mut inc = 0.0;
        let mut err = 0.0;
        for j in 0..7 {
            inc += B5[j] * k[j][d];
            err += E[j] * k[j][d];
        }
        y_new[d] += h * inc;
        let scale = atol + rtol * y[d].abs().max(y_new[d].abs());
        acc += (h * err / scale).powi(2);
    }
    Ok(Trial {
        y: y_new,
        k_last: k[6],
        data_last: data_last.expect("seven stages evaluated"),
        err: (acc / N as f64).sqrt(),
    })
}

/// Step-size factor from an error estimate, clamped to `[0.2, 5]`.
pub(crate) fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        5.0
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
    }
}
