//! Globally adaptive 7/15-point Gauss-Kronrod quadrature for small
//! vector-valued integrands sharing one subdivision.

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
    /// Equal panels each breakpoint segment is split into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_intervals: 4000,
            initial_panels: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<const K: usize> {
    pub value: [f64; K],
    pub error: [f64; K],
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: [f64; K],
}

fn kronrod<const K: usize, F: Fn(f64) -> [f64; K]>(f: &F, a: f64, b: f64) -> Panel<K> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = [0.0; K];
    let mut rg = [0.0; K];
    for k in 0..K {
        rk[k] = WGK[7] * fc[k];
        rg[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for k in 0..K {
            let s = f1[k] + f2[k];
            rk[k] += WGK[j] * s;
            if j % 2 == 1 {
                rg[k] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; K];
    let mut error = [0.0; K];
    for k in 0..K {
        value[k] = rk[k] * h;
        error[k] = ((rk[k] - rg[k]) * h).abs();
    }
    Panel { a, b, value, error }
}

/// Integrates `f` over `[points[0], points.last()]`, always splitting at the
/// interior points. Each component must satisfy
/// `error <= max(abs_tol, rel_tol * |value|)`.
pub fn integrate<const K: usize, F>(f: F, points: &[f64], opts: &QuadOptions) -> Result<QuadResult<K>>
where
    F: Fn(f64) -> [f64; K],
{
    let mut pts: Vec<f64> = points.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let mut panels: Vec<Panel<K>> = Vec::new();
    let n0 = opts.initial_panels.max(1);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        for i in 0..n0 {
            let x0 = a + (b - a) * i as f64 / n0 as f64;
            let x1 = if i + 1 == n0 { b } else { a + (b - a) * (i + 1) as f64 / n0 as f64 };
            panels.push(kronrod(&f, x0, x1));
        }
    }
    let mut evaluations = 15 * panels.len();

    loop {
        let mut value = [0.0; K];
        let mut error = [0.0; K];
        for p in &panels {
            for k in 0..K {
                value[k] += p.value[k];
                error[k] += p.error[k];
            }
        }
        let mut tol = [0.0; K];
        let mut done = true;
        for k in 0..K {
            tol[k] = opts.abs_tol.max(opts.rel_tol * value[k].abs());
            if error[k] > tol[k] {
                done = false;
            }
        }
        if done {
            return Ok(QuadResult {
                value,
                error,
                evaluations,
                intervals: panels.len(),
            });
        }
        if panels.len() >= opts.max_intervals {
            let worst = (0..K)
                .max_by(|&i, &j| {
                    let ri = error[i] / tol[i].max(f64::MIN_POSITIVE);
                    let rj = error[j] / tol[j].max(f64::MIN_POSITIVE);
                    ri.partial_cmp(&rj).unwrap()
                })
                .unwrap_or(0);
            return Err(Error::Quadrature {
                estimate: value[worst],
                error: error[worst],
                intervals: panels.len(),
            });
        }
        let score = |p: &Panel<K>| {
            (0..K)
                .map(|k| p.error[k] / tol[k].max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max)
        };
        let (idx, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| (i, score(p)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let p = panels.swap_remove(idx);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Quadrature {
                estimate: value[0],
                error: error[0],
                intervals: panels.len() + 1,
            });
        }
        panels.push(kronrod(&f, p.a, mid));
        panels.push(kronrod(&f, mid, p.b));
        evaluations += 30;
    }
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate1<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: &QuadOptions) -> Result<(f64, f64)> {
    let r = integrate(|x| [f(x)], points, opts)?;
    Ok((r.value[0], r.error[0]))
}
