use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{NetworkMedium, TorusPoint};
use crate::scalar::{Real, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct BallMassProfile<T> {
    pub center: TorusPoint<T>,
    pub radii: Vec<T>,
    pub masses: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport<T> {
    pub pass: bool,
    /// Largest drop of `mass(r) / r^alpha` between consecutive radii (0 if none).
    pub worst_violation: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDimension<T> {
    pub lower: T,
    pub upper: T,
    /// Slope over the window at the smallest radii.
    pub smallest: T,
}

/// Length of `{a + t d : t in [0, 1]} ∩ B_r(c)`.
///
/// Works from the foot of the perpendicular so a center on the line gives a
/// chord of exactly `2r` rather than one polluted by cancellation.
fn chord<T: Real>(a: &[T], d: &[T], len: T, c: &[T], r: T) -> T {
    let w: Vec<T> = a.iter().zip(c).map(|(x, y)| *x - *y).collect();
    let wd: T = w.iter().zip(d).map(|(x, y)| *x * *y).sum();
    let t_foot = -wd / (len * len);
    let h2: T = w.iter().zip(d).map(|(x, y)| (*x + t_foot * *y).powi(2)).sum();
    if h2 >= r * r {
        return T::zero();
    }
    let s = (r * r - h2).sqrt() / len;
    let t0 = (t_foot - s).max(T::zero());
    let t1 = (t_foot + s).min(T::one());
    if t1 <= t0 {
        T::zero()
    } else {
        (t1 - t0) * len
    }
}

/// Exact `‖θ‖(B_r(center))` for each radius.
pub fn ball_mass_profile<T: Real>(
    medium: &NetworkMedium<T>,
    center: &TorusPoint<T>,
    radii: &[T],
) -> Result<BallMassProfile<T>> {
    let half = T::lit(0.5);
    if let Some(&bad) = radii.iter().find(|&&r| !(r > T::zero() && r < half)) {
        return Err(Error::RadiusTooLarge(bad.as_f64()));
    }
    let net = &medium.network;
    let n = net.dimension();
    let tol = Tolerances::<T>::standard();
    let factor = medium.trace_factor();
    let rmax = radii.iter().copied().fold(T::zero(), T::max);
    let c = center.coords();
    let mut masses = vec![T::zero(); radii.len()];
    for e in net.support_edges(&tol) {
        let edge = &net.edges()[e];
        let d = net.displacement(e);
        let len = net.length(e);
        let xu = net.nodes()[edge.u].coords();
        // Integer translates k with the lifted segment's box meeting the ball's box.
        let ranges: Vec<(i64, i64)> = (0..n)
            .map(|i| {
                let lo = xu[i].min(xu[i] + d[i]);
                let hi = xu[i].max(xu[i] + d[i]);
                (
                    (c[i] - rmax - hi).ceil().to_i64().unwrap(),
                    (c[i] + rmax - lo).floor().to_i64().unwrap(),
                )
            })
            .collect();
        if ranges.iter().any(|r| r.0 > r.1) {
            continue;
        }
        let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'lifts: loop {
            let a: Vec<T> = (0..n).map(|i| xu[i] + T::from_i64(k[i]).unwrap()).collect();
            for (m, &r) in masses.iter_mut().zip(radii) {
                *m += factor * edge.weight * chord(&a, &d, len, c, r);
            }
            let mut i = 0;
            loop {
                if i == n {
                    break 'lifts;
                }
                k[i] += 1;
                if k[i] <= ranges[i].1 {
                    break;
                }
                k[i] = ranges[i].0;
                i += 1;
            }
        }
    }
    Ok(BallMassProfile {
        center: center.clone(),
        radii: radii.to_vec(),
        masses,
    })
}

/// Largest drop of `mass / r^alpha` along increasing radii.
fn worst_drop<T: Real>(profile: &BallMassProfile<T>, alpha: T) -> T {
    let ratios: Vec<T> = profile
        .masses
        .iter()
        .zip(&profile.radii)
        .map(|(m, r)| *m / r.powf(alpha))
        .collect();
    ratios
        .windows(2)
        .fold(T::zero(), |w, p| w.max(p[0] - p[1]))
}

/// Checks that `mass(r) / r^alpha` is nondecreasing for every center.
pub fn monotonicity_check<T: Real>(
    medium: &NetworkMedium<T>,
    centers: &[TorusPoint<T>],
    radii: &[T],
    alpha: T,
) -> Result<MonotonicityReport<T>> {
    let profiles = centers
        .par_iter()
        .map(|c| ball_mass_profile(medium, c, radii))
        .collect::<Result<Vec<_>>>()?;
    let mut worst_margin = T::infinity();
    let mut worst_violation = T::zero();
    for p in &profiles {
        let drop = worst_drop(p, alpha);
        let mass_max = p.masses.iter().copied().fold(T::zero(), T::max);
        let slack = T::lit(1e-12) * mass_max.max(T::min_positive_value());
        worst_margin = worst_margin.min(slack - drop);
        worst_violation = worst_violation.max(drop);
    }
    Ok(MonotonicityReport {
        pass: profiles.is_empty() || worst_margin >= T::zero(),
        worst_violation,
    })
}

fn slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = T::from_usize(xs.len()).unwrap();
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxy: T = xs.iter().zip(ys).map(|(x, y)| (*x - mx) * (*y - my)).sum();
    let sxx: T = xs.iter().map(|x| (*x - mx) * (*x - mx)).sum();
    sxy / sxx
}

/// Least-squares slopes of `log mass` against `log r` over windows spanning
/// one decade of radius; `lower` and `upper` are their extremes.
pub fn estimate_local_dimension<T: Real>(profile: &BallMassProfile<T>) -> Result<LocalDimension<T>> {
    let r = &profile.radii;
    let m = &profile.masses;
    if r.len() < 4 || r.len() != m.len() {
        return Err(Error::DegenerateProfile(format!("need at least 4 radii, got {}", r.len())));
    }
    if r.windows(2).any(|w| w[0] >= w[1]) || r[0] <= T::zero() {
        return Err(Error::DegenerateProfile("radii must be positive and increasing".into()));
    }
    let decades = (r[r.len() - 1] / r[0]).log10();
    if decades < T::lit(2.0) - T::lit(1e-9) {
        return Err(Error::DegenerateProfile(format!(
            "radii span {:.3} decades, need 2",
            decades.as_f64()
        )));
    }
    if m[m.len() - 1] <= T::zero() {
        return Err(Error::DegenerateProfile("zero mass at the largest radius".into()));
    }
    let lr: Vec<T> = r.iter().map(|x| x.ln()).collect();
    let ten = T::lit(10.0).ln();
    let mut slopes = Vec::new();
    for i in 0..r.len() {
        let Some(j) = (i..r.len()).find(|&j| lr[j] - lr[i] >= ten - T::lit(1e-9)) else {
            break;
        };
        if j - i < 1 || m[i..=j].iter().any(|&x| x <= T::zero()) {
            continue;
        }
        let lm: Vec<T> = m[i..=j].iter().map(|x| x.ln()).collect();
        slopes.push(slope(&lr[i..=j], &lm));
    }
    let Some(&smallest) = slopes.first() else {
        return Err(Error::DegenerateProfile("no decade window with positive mass".into()));
    };
    Ok(LocalDimension {
        lower: slopes.iter().copied().fold(T::infinity(), T::min),
        upper: slopes.iter().copied().fold(T::neg_infinity(), T::max),
        smallest,
    })
}

/// Geometric radii `r0 * ratio^i`.
pub fn geometric_radii<T: Real>(r0: T, r1: T, count: usize) -> Vec<T> {
    let q = (r1 / r0).powf(T::one() / T::from_usize(count - 1).unwrap());
    (0..count).map(|i| r0 * q.powi(i as i32)).collect()
}
