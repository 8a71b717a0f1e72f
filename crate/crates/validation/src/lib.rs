//! Brute-force reference implementations used as test oracles. They favour
//! obviousness over speed and share no code with the library under test.

use rand::Rng;

/// Strictly decreasing staircase of `k` points in the unit square, sorted by
/// increasing first objective.
pub fn random_front(r: &mut impl Rng, k: usize) -> Vec<Vec<f64>> {
    let mut a: Vec<f64> = (0..k).map(|_| r.random()).collect();
    let mut b: Vec<f64> = (0..k).map(|_| r.random()).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(|x, y| y.total_cmp(x));
    a.into_iter().zip(b).map(|(x, y)| vec![x, y]).collect()
}

/// Area dominated by `y`, below `r` and not dominated by the staircase `a`
/// (sorted by increasing first objective), integrated along the first axis.
pub fn hv_gain(a: &[Vec<f64>], r: &[f64; 2], y: [f64; 2]) -> f64 {
    if y[0] >= r[0] || y[1] >= r[1] {
        return 0.0;
    }
    let mut gain = 0.0;
    let mut t = y[0];
    let mut height = r[1];
    for p in a {
        if p[0] > t {
            let next = p[0].min(r[0]);
            gain += (next - t) * (height - y[1]).max(0.0);
            t = next;
        }
        height = height.min(p[1]);
        if t >= r[0] {
            break;
        }
    }
    gain + (r[0] - t).max(0.0) * (height - y[1]).max(0.0)
}

/// Sample mean and its standard error from running sums, with the error
/// floored at `1/n`.
pub fn mean_and_se(sum: f64, sum2: f64, n: usize) -> (f64, f64) {
    let n = n as f64;
    let m = sum / n;
    (m, ((sum2 / n - m * m).max(0.0) / n).sqrt().max(1.0 / n))
}

/// Distinct non-dominated points, sorted lexicographically. O(N²).
pub fn brute_filter(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let beaten = points.iter().any(|q| q.iter().zip(p).all(|(a, b)| a <= b) && q != p);
        if !beaten && !out.contains(p) {
            out.push(p.clone());
        }
    }
    out.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    out
}

/// Constrained-domination fronts by repeated peeling, indices ascending.
pub fn brute_fronts(objs: &[Vec<f64>], viol: &[f64]) -> Vec<Vec<usize>> {
    let beats = |i: usize, j: usize| match (viol[i] > 0.0, viol[j] > 0.0) {
        (false, true) => true,
        (true, false) => false,
        (true, true) => viol[i] < viol[j],
        (false, false) => objs[i].iter().zip(&objs[j]).all(|(a, b)| a <= b) && objs[i] != objs[j],
    };
    let mut left: Vec<usize> = (0..objs.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left.iter().copied().filter(|&j| !left.iter().any(|&i| beats(i, j))).collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}
