use proptest::prelude::*;
use rprun_core::run_stats::{first_occurrence, first_occurrences, run_report};
use rprun_core::{Label, LabelStream};

fn labels() -> impl Strategy<Value = Vec<Label>> {
    prop::collection::vec(
        prop::bool::ANY.prop_map(|r| if r { Label::Red } else { Label::Blue }),
        0..120,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn reversal_keeps_runs(ls in labels()) {
        let mut rev = ls.clone();
        rev.reverse();
        let a = run_report(&LabelStream::new(ls));
        let b = run_report(&LabelStream::new(rev));
        for label in [Label::Red, Label::Blue] {
            prop_assert_eq!(a.histogram(label), b.histogram(label));
            prop_assert_eq!(a.longest_len(label), b.longest_len(label));
        }
    }

    #[test]
    fn histograms_add_across_a_label_change(a in labels(), b in labels()) {
        prop_assume!(a.last().is_some() && a.last() != b.first());
        let mut joined = a.clone();
        joined.extend(b.iter().copied());
        let (ra, rb) = (run_report(&LabelStream::new(a)), run_report(&LabelStream::new(b)));
        let rj = run_report(&LabelStream::new(joined));
        for label in [Label::Red, Label::Blue] {
            let mut sum = ra.histogram(label).clone();
            for (len, count) in rb.histogram(label) {
                *sum.entry(*len).or_default() += count;
            }
            prop_assert_eq!(rj.histogram(label), &sum);
        }
    }

    #[test]
    fn histogram_accounts_for_every_item(ls in labels()) {
        let n = ls.len();
        let r = run_report(&LabelStream::new(ls));
        let total: u64 = [Label::Red, Label::Blue]
            .iter()
            .flat_map(|&l| r.histogram(l).iter().map(|(len, c)| *len as u64 * c))
            .sum();
        prop_assert_eq!(total, n as u64);
    }

    #[test]
    fn first_occurrence_is_monotone_in_k(ls in labels()) {
        let stream = LabelStream::new(ls);
        for label in [Label::Red, Label::Blue] {
            let rows = first_occurrences(&stream, label, 15);
            for w in rows.windows(2) {
                match (w[0].index, w[1].index) {
                    (Some(a), Some(b)) => prop_assert!(a <= b),
                    (None, b) => prop_assert!(b.is_none()),
                    (Some(_), None) => {}
                }
            }
            for row in &rows {
                prop_assert_eq!(row, &first_occurrence(&stream, label, row.k).unwrap());
            }
        }
    }
}
