//! Adaptive 7/15-point Gauss-Kronrod rule, used when the double-exponential
//! rule does not settle (sharp interior features).

use super::QuadResult;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn rule<F>(f: &F, lo: f64, hi: f64, a: f64, b: f64, evals: &mut usize) -> Result<(f64, f64)>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64> {
        // distances to the outer ends, anchored on the nearer piece edge
        let from_lo = (a - lo) + (x - a);
        let to_hi = (hi - b) + (b - x);
        let v = f(x, from_lo, to_hi)?;
        *evals += 1;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteSample(x))
        }
    };
    let fc = eval(center)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = eval(center - dx)? + eval(center + dx)?;
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok((kron * half, ((kron - gauss) * half).abs()))
}

pub(crate) fn integrate<F>(f: &F, lo: f64, hi: f64, rel_tol: f64, max_pieces: usize) -> Result<QuadResult>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    let mut evals = 0;
    let (v, e) = rule(f, lo, hi, lo, hi, &mut evals)?;
    let mut pieces = vec![Piece {
        a: lo,
        b: hi,
        value: v,
        err: e,
    }];
    loop {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.err).sum();
        let floor = 50.0 * f64::EPSILON * pieces.iter().map(|p| p.value.abs()).sum::<f64>();
        if err <= (rel_tol * total.abs()).max(floor) || pieces.len() >= max_pieces {
            return Ok(QuadResult {
                value: total,
                err_est: err.max(floor),
                evals,
                converged: err <= (rel_tol * total.abs()).max(floor),
            });
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty");
        let worst = pieces.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            pieces.push(worst);
            let total: f64 = pieces.iter().map(|p| p.value).sum();
            return Ok(QuadResult {
                value: total,
                err_est: err,
                evals,
                converged: false,
            });
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = rule(f, lo, hi, a, b, &mut evals)?;
            pieces.push(Piece { a, b, value, err });
        }
    }
}
