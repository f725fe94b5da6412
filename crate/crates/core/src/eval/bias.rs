//! Inference on unrated sessions and the rated-versus-unrated comparison.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::classify::SessionClassifier;
use super::stats::chi_squared_2x2;
use crate::chatlog::{Corpus, Session};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Call {
    pub session_id: String,
    pub probability: f64,
    pub call: u8,
}

pub fn infer_unlabeled(model: &dyn SessionClassifier, sessions: &[&Session], threshold: f64) -> Result<Vec<Call>> {
    let probs = model.predict_proba(sessions)?;
    Ok(sessions
        .iter()
        .zip(probs)
        .map(|(s, p)| Call {
            session_id: s.id().to_string(),
            probability: p,
            call: u8::from(p >= threshold),
        })
        .collect())
}

const CALLS_HEADER: &str = "session_id\tprobability\tcall";

/// Tab-separated, one call per line after a header.
pub fn write_calls<W: Write>(calls: &[Call], mut out: W) -> Result<()> {
    writeln!(out, "{CALLS_HEADER}")?;
    for c in calls {
        writeln!(out, "{}\t{}\t{}", c.session_id, c.probability, c.call)?;
    }
    Ok(())
}

pub fn read_calls<R: BufRead>(input: R) -> Result<Vec<Call>> {
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim_end() == CALLS_HEADER => {}
        _ => return Err(Error::Format(format!("calls file must start with {CALLS_HEADER:?}"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Format(format!("calls line {}: {line:?}", i + 2));
        let mut parts = line.split('\t');
        let (Some(id), Some(p), Some(c), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let probability: f64 = p.parse().map_err(|_| bad())?;
        let call: u8 = c.parse().map_err(|_| bad())?;
        if call > 1 || !(0.0..=1.0).contains(&probability) {
            return Err(bad());
        }
        out.push(Call {
            session_id: id.to_string(),
            probability,
            call,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub labeled_n: u64,
    pub labeled_dissatisfied: u64,
    pub unlabeled_n: u64,
    pub unlabeled_dissatisfied: u64,
    pub labeled_fraction: f64,
    pub unlabeled_fraction: f64,
    pub combined_fraction: f64,
    /// Rows labeled / unlabeled, columns dissatisfied / not.
    pub table: [[u64; 2]; 2],
    /// `None` when a marginal of the table is zero.
    pub chi_squared: Option<f64>,
    pub p_value: Option<f64>,
}

fn frac(a: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        a as f64 / n as f64
    }
}

/// Ground-truth labels for rated sessions, model calls for unrated ones.
pub fn bias_report(corpus: &Corpus, calls: &[Call]) -> Result<BiasReport> {
    let by_id: HashMap<&str, u8> = calls.iter().map(|c| (c.session_id.as_str(), c.call)).collect();
    let (mut ln, mut ld, mut un, mut ud) = (0u64, 0u64, 0u64, 0u64);
    for s in corpus.sessions() {
        match s.label() {
            Some(y) => {
                ln += 1;
                ld += y as u64;
            }
            None => {
                let c = by_id
                    .get(s.id())
                    .ok_or_else(|| Error::InvalidInput(format!("no call for unlabeled session {:?}", s.id())))?;
                un += 1;
                ud += *c as u64;
            }
        }
    }
    let table = [[ld, ln - ld], [ud, un - ud]];
    let test = chi_squared_2x2(table).ok();
    Ok(BiasReport {
        labeled_n: ln,
        labeled_dissatisfied: ld,
        unlabeled_n: un,
        unlabeled_dissatisfied: ud,
        labeled_fraction: frac(ld, ln),
        unlabeled_fraction: frac(ud, un),
        combined_fraction: frac(ld + ud, ln + un),
        table,
        chi_squared: test.map(|t| t.0),
        p_value: test.map(|t| t.1),
    })
}

impl BiasReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{:<10} {:>9} {:>13} {:>9}\n", "Group", "Sessions", "Dissatisfied", "Fraction");
        for (name, n, d, f) in [
            ("Labeled", self.labeled_n, self.labeled_dissatisfied, self.labeled_fraction),
            ("Unlabeled", self.unlabeled_n, self.unlabeled_dissatisfied, self.unlabeled_fraction),
            (
                "Combined",
                self.labeled_n + self.unlabeled_n,
                self.labeled_dissatisfied + self.unlabeled_dissatisfied,
                self.combined_fraction,
            ),
        ] {
            out.push_str(&format!("{name:<10} {n:>9} {d:>13} {f:>9.4}\n"));
        }
        match (self.chi_squared, self.p_value) {
            (Some(c), Some(p)) => out.push_str(&format!("chi-squared = {c:.4}, p = {p:.4e}\n")),
            _ => out.push_str("chi-squared undefined (zero marginal)\n"),
        }
        out
    }

    /// Three-bar chart of the dissatisfied fractions.
    pub fn to_svg(&self) -> String {
        let (w, h, top, bottom, left) = (360.0, 260.0, 20.0, 40.0, 50.0);
        let plot_h = h - top - bottom;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        );
        out.push_str(&format!(
            "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{}\" stroke=\"black\"/>\n",
            h - bottom
        ));
        for tick in 0..=4 {
            let v = tick as f64 * 0.25;
            let y = top + plot_h * (1.0 - v);
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{v:.2}</text>\n",
                left - 6.0,
                y + 4.0
            ));
        }
        let bars = [
            ("Labeled", self.labeled_fraction, "#4c72b0"),
            ("Unlabeled", self.unlabeled_fraction, "#dd8452"),
            ("Combined", self.combined_fraction, "#55a868"),
        ];
        for (i, (name, f, color)) in bars.iter().enumerate() {
            let x = left + 20.0 + i as f64 * 95.0;
            let bh = plot_h * f;
            out.push_str(&format!(
                "<rect x=\"{x}\" y=\"{:.1}\" width=\"60\" height=\"{bh:.1}\" fill=\"{color}\"/>\n",
                top + plot_h - bh
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"middle\">{f:.3}</text>\n",
                x + 30.0,
                top + plot_h - bh - 4.0
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{name}</text>\n",
                x + 30.0,
                h - bottom + 18.0
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chatlog::tests::session;
    use crate::chatlog::Speaker::*;

    struct Constant(f64);

    impl SessionClassifier for Constant {
        fn name(&self) -> String {
            "const".into()
        }

        fn predict_proba(&self, sessions: &[&Session]) -> Result<Vec<f64>> {
            Ok(vec![self.0; sessions.len()])
        }
    }

    fn corpus(labeled: &[u8], unlabeled: usize) -> Corpus {
        let mut all = Vec::new();
        for (i, &y) in labeled.iter().enumerate() {
            let r = if y == 1 { 1 } else { 5 };
            all.push(session(&format!("l{i}"), &[(Agent, 0.0, "hi")], Some(r)));
        }
        for i in 0..unlabeled {
            all.push(session(&format!("u{i}"), &[(Agent, 0.0, "hi")], None));
        }
        Corpus::from_sessions(all).unwrap()
    }

    fn calls(c: &Corpus, dissatisfied_every: usize) -> Vec<Call> {
        c.unlabeled()
            .enumerate()
            .map(|(i, s)| Call {
                session_id: s.id().into(),
                probability: 0.5,
                call: u8::from(i % dissatisfied_every == 0),
            })
            .collect()
    }

    #[test]
    fn weighted_combination() {
        let labels: Vec<u8> = (0..10).map(|i| u8::from(i < 2)).collect();
        let c = corpus(&labels, 10);
        let r = bias_report(&c, &calls(&c, 2)).unwrap();
        assert_eq!(r.labeled_fraction, 0.2);
        assert_eq!(r.unlabeled_fraction, 0.5);
        assert!((r.combined_fraction - 0.35).abs() < 1e-15);
        assert_eq!(r.table.iter().flatten().sum::<u64>(), 20);
    }

    #[test]
    fn equal_fractions_give_zero_statistic() {
        let labels: Vec<u8> = (0..10).map(|i| u8::from(i % 2 == 0)).collect();
        let c = corpus(&labels, 10);
        let r = bias_report(&c, &calls(&c, 2)).unwrap();
        assert!(r.chi_squared.unwrap().abs() < 1e-12);
        assert!((r.p_value.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_call_is_an_error() {
        let c = corpus(&[1, 0], 3);
        let mut cl = calls(&c, 2);
        cl.pop();
        assert!(bias_report(&c, &cl).is_err());
    }

    #[test]
    fn inference_and_calls_round_trip() {
        let c = corpus(&[1, 0], 4);
        let unl: Vec<&Session> = c.unlabeled().collect();
        assert!(infer_unlabeled(&Constant(0.7), &[], 0.5).unwrap().is_empty());
        let a = infer_unlabeled(&Constant(0.7), &unl, 0.5).unwrap();
        assert!(a.iter().all(|x| x.call == 1));
        assert_eq!(a, infer_unlabeled(&Constant(0.7), &unl, 0.5).unwrap());
        let mut buf = Vec::new();
        write_calls(&a, &mut buf).unwrap();
        assert_eq!(read_calls(buf.as_slice()).unwrap(), a);
        assert!(read_calls("nope\n".as_bytes()).is_err());
    }

    #[test]
    fn svg_has_three_bars() {
        let c = corpus(&[1, 0, 0, 0], 4);
        let svg = bias_report(&c, &calls(&c, 2)).unwrap().to_svg();
        assert_eq!(svg.matches("<rect").count(), 3);
    }

    proptest::proptest! {
        #[test]
        fn combined_between_groups(ld in 0u64..30, lnd in 1u64..30, ud in 0u64..30, und in 1u64..30) {
            let labels: Vec<u8> = (0..ld + lnd).map(|i| u8::from(i < ld)).collect();
            let c = corpus(&labels, (ud + und) as usize);
            let cl: Vec<Call> = c.unlabeled().enumerate().map(|(i, s)| Call {
                session_id: s.id().into(), probability: 0.5, call: u8::from((i as u64) < ud),
            }).collect();
            let r = bias_report(&c, &cl).unwrap();
            let lo = r.labeled_fraction.min(r.unlabeled_fraction);
            let hi = r.labeled_fraction.max(r.unlabeled_fraction);
            proptest::prop_assert!(r.combined_fraction >= lo - 1e-12 && r.combined_fraction <= hi + 1e-12);
        }
    }
}
