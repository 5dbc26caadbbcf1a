/// Ranks (1-based) with ties sharing the average of their positions.
///
/// Also returns the sizes of all tie groups larger than one.
pub fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank mean(i+1..=j)
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_share_average_rank() {
        let (r, t) = midranks(&[1.0, 2.0, 2.0, 4.0, 5.0, 6.0, 7.0, 7.0, 9.0, 10.0]);
        assert_eq!(r, vec![1.0, 2.5, 2.5, 4.0, 5.0, 6.0, 7.5, 7.5, 9.0, 10.0]);
        assert_eq!(t, vec![2, 2]);
    }

    #[test]
    fn negative_zero_ties_with_zero() {
        let (r, _) = midranks(&[0.0, -0.0, 1.0]);
        assert_eq!(r[0], r[1]);
    }
}
