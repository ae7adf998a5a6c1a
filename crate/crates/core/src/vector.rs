//! Small dense-vector kernels shared by the solver modules.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `x + alpha * d`, allocated.
pub fn add_scaled(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), d.len());
    x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect()
}

/// Index of the smallest entry among `indices`; ties go to the first one listed.
pub fn argmin_over(values: &[f64], indices: impl IntoIterator<Item = usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in indices {
        match best {
            Some(b) if values[i] >= values[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Index of the largest entry among `indices`; ties go to the first one listed.
pub fn argmax_over(values: &[f64], indices: impl IntoIterator<Item = usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in indices {
        match best {
            Some(b) if values[i] <= values[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arg_extrema_break_ties_toward_first_index() {
        let v = [2.0, 1.0, 1.0, 3.0, 3.0];
        assert_eq!(argmin_over(&v, 0..5), Some(1));
        assert_eq!(argmax_over(&v, 0..5), Some(3));
        assert_eq!(argmin_over(&v, [0, 3]), Some(0));
        assert_eq!(argmin_over(&v, []), None);
    }
}
