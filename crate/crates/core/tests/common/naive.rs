//! Straight transcriptions of the formulas over plain slices, written without
//! reference to the library's implementation.

use std::collections::{BTreeMap, HashMap};

/// Per-group personhood from `(person, group, unit index)` rows: each person
/// adds `1/k` to each of their `k` distinct units.
pub fn personhood(rows: &[(String, String, usize)], m: usize) -> BTreeMap<String, Vec<f64>> {
    let mut follows: HashMap<&str, (&str, Vec<usize>)> = HashMap::new();
    for (p, g, u) in rows {
        let entry = follows.entry(p).or_insert((g, Vec::new()));
        if !entry.1.contains(u) {
            entry.1.push(*u);
        }
    }
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (g, units) in follows.values() {
        let row = out.entry(g.to_string()).or_insert_with(|| vec![0.0; m]);
        for &u in units {
            row[u] += 1.0 / units.len() as f64;
        }
    }
    out
}

/// `U(T)` for every nonempty `T`, by scanning all access sets.
pub fn union_from_exact(exact: &BTreeMap<u32, u64>, m: usize) -> Vec<u64> {
    let mut u = vec![0u64; 1 << m];
    for t in 1..(1u32 << m) {
        for (&a, &n) in exact {
            if a & t != 0 {
                u[t as usize] += n;
            }
        }
    }
    u
}

/// Inclusion-exclusion: `E(T) = Σ_{X ⊆ T} (-1)^{|T|-|X|} (U(S) - U(S \ X))`.
pub fn exact_from_union(u: &[u64], m: usize) -> Vec<i64> {
    let full = (1u32 << m) - 1;
    let mut e = vec![0i64; 1 << m];
    for t in 1..=full {
        let mut total = 0i64;
        for x in 0..=full {
            if x & !t != 0 {
                continue;
            }
            let inside = u[full as usize] as i64 - u[(full & !x) as usize] as i64;
            let sign = if (t.count_ones() - x.count_ones()) % 2 == 0 {
                1
            } else {
                -1
            };
            total += sign * inside;
        }
        e[t as usize] = total;
    }
    e
}

pub fn evenness_classical(a: &[f64]) -> f64 {
    let m = a.len() as f64;
    let sum: f64 = a.iter().sum();
    let mut g = 0.0;
    for i in 0..a.len() {
        for j in 0..a.len() {
            g += (a[i] - a[j]).abs();
        }
    }
    1.0 - g / (2.0 * m * sum)
}

pub fn evenness_paper(a: &[f64], a_total: f64, a_complement: f64) -> f64 {
    let mut g = 0.0;
    for i in 0..a.len() {
        for j in 0..a.len() {
            if i != j {
                g += (a[i] - a[j]).abs();
            }
        }
    }
    1.0 - g / (2.0 * a_total * a_complement)
}

pub fn joint_exposure(a: &[f64], b: &[f64], totals: &[f64]) -> f64 {
    let a_total: f64 = a.iter().sum();
    let mut s = 0.0;
    for i in 0..a.len() {
        if a[i] > 0.0 {
            s += a[i] / a_total * (b[i] / totals[i]);
        }
    }
    s
}

pub fn concentration_classical(a: &[f64], topics: &[u64]) -> f64 {
    let a_total: f64 = a.iter().sum();
    let n_total = topics.iter().sum::<u64>() as f64;
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] / a_total - topics[i] as f64 / n_total).abs();
    }
    s / 2.0
}

pub fn concentration_paper(a: &[f64], topics: &[u64]) -> f64 {
    let a_total: f64 = a.iter().sum();
    let n_total = topics.iter().sum::<u64>() as f64;
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] / a_total) * (topics[i] as f64 / n_total);
    }
    s / 2.0
}

/// Units sorted by distance from `center`, ties broken by id.
pub fn center_order(positions: &[f64], ids: &[String], center: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&i, &j| {
        let di = (positions[i] - positions[center]).abs();
        let dj = (positions[j] - positions[center]).abs();
        di.partial_cmp(&dj).unwrap().then_with(|| ids[i].cmp(&ids[j]))
    });
    order
}

pub fn centralization(a: &[f64], b: &[f64], order: &[usize]) -> f64 {
    let a_total: f64 = order.iter().map(|&i| a[i]).sum();
    let b_total: f64 = order.iter().map(|&i| b[i]).sum();
    let mut x = vec![0.0];
    let mut y = vec![0.0];
    for &i in order {
        x.push(x.last().unwrap() + a[i] / a_total);
        y.push(y.last().unwrap() + b[i] / b_total);
    }
    let mut ci = 0.0;
    for k in 1..x.len() {
        ci += x[k - 1] * y[k] - x[k] * y[k - 1];
    }
    ci
}

/// Numerator and denominator of the clustering index with kernel `e^{-d}`.
pub fn clustering_terms(a: &[f64], totals: &[f64], positions: &[f64]) -> (f64, f64) {
    let m = a.len();
    let a_total: f64 = a.iter().sum();
    let k = |i: usize, j: usize| (-(positions[i] - positions[j]).abs()).exp();
    let mut kernel_sum = 0.0;
    for i in 0..m {
        for j in 0..m {
            kernel_sum += k(i, j);
        }
    }
    let base = a_total / (m * m) as f64 * kernel_sum;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..m {
        for j in 0..m {
            num += a[i] / a_total * k(i, j) * a[j];
            den += a[i] / a_total * k(i, j) * totals[j];
        }
    }
    (num - base, den - base)
}

/// Leaning score `Σ w_k f_k` with weights -1, -0.5, 0, 0.5, 1.
pub fn leaning(f: [f64; 5]) -> f64 {
    -f[0] - 0.5 * f[1] + 0.5 * f[3] + f[4]
}
