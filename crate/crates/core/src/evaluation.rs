//! Accuracy measures: precision, recall, the Newell ranking distance and
//! cohort averages, plus CSV output of the averaged series.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;
use std::io::Write;

use crate::error::{invalid, Result};

/// Scores of one answered query.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QueryEvaluation {
    pub precision: f64,
    pub recall: f64,
    /// Unnormalized Newell distance.
    pub newell: f64,
}

/// Per-query averages across a cohort; index 0 is query 1.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CohortSeries {
    pub avg_precision: Vec<f64>,
    pub avg_recall: Vec<f64>,
    pub avg_norm_newell: Vec<f64>,
}

impl CohortSeries {
    pub fn len(&self) -> usize {
        self.avg_precision.len()
    }

    pub fn is_empty(&self) -> bool {
        self.avg_precision.is_empty()
    }

    /// Writes `query_index,avg_precision,avg_recall,avg_norm_newell`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["query_index", "avg_precision", "avg_recall", "avg_norm_newell"])?;
        for i in 0..self.len() {
            w.write_record([
                (i + 1).to_string(),
                self.avg_precision[i].to_string(),
                self.avg_recall[i].to_string(),
                self.avg_norm_newell[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `(|rec ∩ rel| / |rec|, |rec ∩ rel| / |rel|)`.
///
/// An empty recommendation has precision 1 only when nothing was relevant;
/// an empty relevant set gives recall 1.
pub fn precision_recall<T: Ord>(recommended: &BTreeSet<T>, relevant: &BTreeSet<T>) -> (f64, f64) {
    let hits = recommended.intersection(relevant).count() as f64;
    let precision = if recommended.is_empty() {
        if relevant.is_empty() {
            1.0
        } else {
            0.0
        }
    } else {
        hits / recommended.len() as f64
    };
    let recall = if relevant.is_empty() {
        1.0
    } else {
        hits / relevant.len() as f64
    };
    (precision, recall)
}

/// Newell weight of rank `i` among `n` items: `((n - i) / i)^2`.
pub fn newell_weight(i: usize, n: usize) -> f64 {
    let r = (n as f64 - i as f64) / i as f64;
    r * r
}

fn check_ranks(ranks: &[usize], what: &str) -> Result<()> {
    let n = ranks.len();
    let mut seen = vec![false; n];
    for &r in ranks {
        if r == 0 || r > n || std::mem::replace(&mut seen[r - 1], true) {
            return Err(invalid(format!("{what} ranks are not a permutation of 1..={n}")));
        }
    }
    Ok(())
}

/// Newell distance between two rankings of the same items.
///
/// `sys_rank[j]` and `usr_rank[j]` are the 1-based positions of item `j`
/// according to the system and the user.
pub fn newell_distance(sys_rank: &[usize], usr_rank: &[usize]) -> Result<f64> {
    if sys_rank.len() != usr_rank.len() {
        return Err(invalid("rankings cover different numbers of items"));
    }
    if sys_rank.is_empty() {
        return Err(invalid("rankings are empty"));
    }
    check_ranks(sys_rank, "system")?;
    check_ranks(usr_rank, "user")?;
    let n = sys_rank.len();
    Ok(sys_rank
        .iter()
        .zip(usr_rank)
        .map(|(&s, &u)| {
            (newell_weight(u, n) * u as f64 - newell_weight(s, n) * s as f64).abs()
        })
        .sum())
}

/// Newell distance between two orderings (best first) of the same items.
pub fn newell_from_orders<T: Eq + Hash>(sys_order: &[T], usr_order: &[T]) -> Result<f64> {
    let usr_pos: HashMap<&T, usize> = usr_order.iter().enumerate().map(|(i, x)| (x, i + 1)).collect();
    if usr_pos.len() != usr_order.len() {
        return Err(invalid("user ordering repeats an item"));
    }
    if sys_order.len() != usr_order.len() {
        return Err(invalid("orderings cover different item sets"));
    }
    let mut sys_rank = Vec::with_capacity(sys_order.len());
    let mut usr_rank = Vec::with_capacity(sys_order.len());
    for (i, item) in sys_order.iter().enumerate() {
        let u = usr_pos
            .get(item)
            .ok_or_else(|| invalid("orderings cover different item sets"))?;
        sys_rank.push(i + 1);
        usr_rank.push(*u);
    }
    newell_distance(&sys_rank, &usr_rank)
}

/// Divides every value by the global maximum. All-zero input stays zero.
pub fn normalize_newell(values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let max = values
        .iter()
        .flatten()
        .fold(0.0_f64, |m, &v| m.max(v));
    values
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| if max > 0.0 { v / max } else { 0.0 })
                .collect()
        })
        .collect()
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

/// Averages aligned per-user series; Newell distances are normalized by the
/// maximum over the whole cohort before averaging.
pub fn cohort_averages(per_user: &[Vec<QueryEvaluation>]) -> Result<CohortSeries> {
    let Some(first) = per_user.first() else {
        return Ok(CohortSeries::default());
    };
    let len = first.len();
    if per_user.iter().any(|s| s.len() != len) {
        return Err(invalid("user series have different lengths"));
    }
    let users = per_user.len();
    let newell: Vec<Vec<f64>> = per_user
        .iter()
        .map(|s| s.iter().map(|e| e.newell).collect())
        .collect();
    let norm = normalize_newell(&newell);
    let mut out = CohortSeries::default();
    for k in 0..len {
        out.avg_precision
            .push(mean(per_user.iter().map(|s| s[k].precision), users));
        out.avg_recall.push(mean(per_user.iter().map(|s| s[k].recall), users));
        out.avg_norm_newell.push(mean(norm.iter().map(|s| s[k]), users));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[u32]) -> BTreeSet<u32> {
        items.iter().copied().collect()
    }

    #[test]
    fn precision_recall_examples() {
        assert_eq!(
            precision_recall(&set(&[1, 2, 3, 4]), &set(&[1, 2, 3, 7, 8, 9])),
            (0.75, 0.5)
        );
        assert_eq!(precision_recall(&set(&[1, 2]), &set(&[1, 2])), (1.0, 1.0));
        assert_eq!(precision_recall(&set(&[1]), &set(&[2])), (0.0, 0.0));
        assert_eq!(precision_recall(&set(&[]), &set(&[])), (1.0, 1.0));
        assert_eq!(precision_recall(&set(&[]), &set(&[1])), (0.0, 0.0));
        assert_eq!(precision_recall(&set(&[1]), &set(&[])), (0.0, 1.0));
    }

    #[test]
    fn newell_examples() {
        assert_eq!(newell_distance(&[1, 2, 3], &[1, 2, 3]).unwrap(), 0.0);
        assert_eq!(newell_distance(&[3, 2, 1], &[1, 2, 3]).unwrap(), 8.0);
        assert_eq!(newell_distance(&[1], &[1]).unwrap(), 0.0);
        assert_eq!(newell_weight(1, 3), 4.0);
        assert_eq!(newell_weight(2, 3), 0.25);
        assert_eq!(newell_weight(3, 3), 0.0);
    }

    #[test]
    fn newell_rejects_non_permutations() {
        assert!(newell_distance(&[1, 1, 3], &[1, 2, 3]).is_err());
        assert!(newell_distance(&[1, 2, 4], &[1, 2, 3]).is_err());
        assert!(newell_distance(&[1, 2], &[1, 2, 3]).is_err());
        assert!(newell_distance(&[], &[]).is_err());
        assert!(newell_from_orders(&["a", "b"], &["a", "c"]).is_err());
    }

    #[test]
    fn newell_from_orders_matches_rank_form() {
        let d = newell_from_orders(&["c", "b", "a"], &["a", "b", "c"]).unwrap();
        assert_eq!(d, 8.0);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize_newell(&[vec![8.0, 4.0], vec![2.0]]),
            vec![vec![1.0, 0.5], vec![0.25]]
        );
        assert_eq!(normalize_newell(&[vec![3.0, 3.0]]), vec![vec![1.0, 1.0]]);
        assert_eq!(normalize_newell(&[vec![0.0, 0.0]]), vec![vec![0.0, 0.0]]);
    }

    fn ev(p: f64, r: f64, n: f64) -> QueryEvaluation {
        QueryEvaluation { precision: p, recall: r, newell: n }
    }

    #[test]
    fn cohort_examples() {
        let a = vec![ev(0.6, 0.5, 2.0), ev(0.2, 1.0, 4.0)];
        let b = vec![ev(0.8, 0.5, 0.0), ev(0.4, 0.0, 4.0)];
        let c = cohort_averages(&[a.clone(), b]).unwrap();
        assert!((c.avg_precision[0] - 0.7).abs() < 1e-12);
        assert_eq!(c.avg_recall, vec![0.5, 0.5]);
        assert_eq!(c.avg_norm_newell, vec![0.25, 1.0]);

        let single = cohort_averages(std::slice::from_ref(&a)).unwrap();
        assert_eq!(single.avg_precision, vec![0.6, 0.2]);
        assert_eq!(single.avg_norm_newell, vec![0.5, 1.0]);

        let same = cohort_averages(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(same.avg_precision, vec![0.6, 0.2]);

        assert!(cohort_averages(&[a, vec![]]).is_err());
    }

    #[test]
    fn series_csv_layout() {
        let c = CohortSeries {
            avg_precision: vec![0.5],
            avg_recall: vec![0.25],
            avg_norm_newell: vec![0.0],
        };
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "query_index,avg_precision,avg_recall,avg_norm_newell\n1,0.5,0.25,0\n"
        );
    }
}
