//! CSV rendering of sweep rows.

use crate::sweep::SweepRow;
use std::io::Write;
use thiserror::Error;

pub const HEADER: [&str; 12] = [
    "pt_dbm",
    "ph_dbm",
    "scheme",
    "combiner",
    "coupling",
    "outage_sim",
    "ci_halfwidth",
    "outage_analytic",
    "outage_asymptotic",
    "trials",
    "seed",
    "rare_event_flag",
];

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("writing CSV header: {0}")]
    Header(#[source] csv::Error),
    #[error("writing CSV row {row}: {source}")]
    Row { row: usize, source: csv::Error },
}

/// Nine significant digits, shortest form: fixed notation for moderate
/// exponents, scientific otherwise.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig9).unwrap_or_default()
}

fn record(row: &SweepRow) -> [String; 12] {
    let m = row.mode;
    let (combiner, coupling) = if m.is_one_bit() {
        (
            m.combiner.as_str().to_string(),
            m.coupling.as_str().to_string(),
        )
    } else {
        (String::new(), String::new())
    };
    let e = &row.estimate;
    [
        format_sig9(row.pt_dbm),
        format_sig9(row.ph_dbm),
        m.scheme.as_str().to_string(),
        combiner,
        coupling,
        format_sig9(e.p_hat),
        format_sig9(e.ci_halfwidth),
        opt(row.analytic),
        opt(row.asymptotic),
        e.trials.to_string(),
        e.seed.to_string(),
        e.is_rare_event().to_string(),
    ]
}

/// Writes the header and one line per row, LF-terminated.
pub fn emit_csv<W: Write>(rows: &[SweepRow], sink: W) -> Result<(), OutputError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(HEADER).map_err(OutputError::Header)?;
    w.flush().map_err(|e| OutputError::Header(e.into()))?;
    for (i, row) in rows.iter().enumerate() {
        w.write_record(record(row))
            .map_err(|source| OutputError::Row { row: i, source })?;
        w.flush().map_err(|e| OutputError::Row {
            row: i,
            source: e.into(),
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use obf_core::energy::Combiner;
    use obf_core::sim::{Coupling, OutageEstimate, SimMode};
    use std::io;

    fn row(mode: SimMode, outages: u64) -> SweepRow {
        SweepRow {
            pt_dbm: 12.5,
            ph_dbm: 12.5,
            mode,
            estimate: OutageEstimate::from_counts(outages, 30_000, 42),
            analytic: mode.is_one_bit().then_some(0.123456789123),
            asymptotic: mode.is_one_bit().then_some(0.0730122221256),
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(10.0), "10");
        assert_eq!(format_sig9(0.123456789123), "0.123456789");
        assert_eq!(format_sig9(-2.5), "-2.5");
        assert_eq!(format_sig9(9.9999999999), "10");
        assert_eq!(format_sig9(1.5e-7), "1.5e-7");
        assert_eq!(format_sig9(123456789012.0), "1.23456789e11");
        assert_eq!(format_sig9(0.000123), "0.000123");
    }

    #[test]
    fn empty_rows_give_header_only() {
        let mut out = Vec::new();
        emit_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), HEADER.join(",") + "\n");
    }

    #[test]
    fn one_row_is_two_lines_of_twelve_fields() {
        let mut out = Vec::new();
        emit_csv(
            &[row(
                SimMode::one_bit(Combiner::Dc, Coupling::Decoupled),
                1000,
            )],
            &mut out,
        )
        .unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.split(',').count() == 12));
        assert!(lines[1].starts_with("12.5,12.5,one_bit,dc,decoupled,0.0333333333,"));
    }

    #[test]
    fn benchmark_rows_leave_inapplicable_fields_empty() {
        let mut out = Vec::new();
        emit_csv(&[row(SimMode::full_feedback(), 3)], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(fields[2], "full_feedback");
        assert_eq!(
            (fields[3], fields[4], fields[7], fields[8]),
            ("", "", "", "")
        );
        assert_eq!(fields[11], "true");
    }

    #[test]
    fn numeric_fields_round_trip() {
        let rows = vec![
            row(SimMode::one_bit(Combiner::Rf, Coupling::Coupled), 777),
            row(SimMode::random_assignment(), 29_999),
        ];
        let mut out = Vec::new();
        emit_csv(&rows, &mut out).unwrap();
        let mut reader = csv::Reader::from_reader(out.as_slice());
        assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), HEADER);
        for (rec, row) in reader.records().zip(&rows) {
            let rec = rec.unwrap();
            let close = |i: usize, want: f64| {
                let got: f64 = rec[i].parse().unwrap();
                assert!(
                    (got - want).abs() <= 5e-9 * want.abs(),
                    "field {i}: {got} vs {want}"
                );
            };
            close(0, row.pt_dbm);
            close(1, row.ph_dbm);
            close(5, row.estimate.p_hat);
            close(6, row.estimate.ci_halfwidth);
            if let Some(a) = row.analytic {
                close(7, a);
                close(8, row.asymptotic.unwrap());
            }
            assert_eq!(rec[9].parse::<u64>().unwrap(), row.estimate.trials);
            assert_eq!(rec[10].parse::<u64>().unwrap(), row.estimate.seed);
        }
    }

    struct FailAfter(usize);

    impl Write for FailAfter {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            if self.0 == 0 {
                return Err(io::Error::other("disk full"));
            }
            self.0 -= 1;
            Ok(buf.len())
        }

        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn write_failure_reports_the_row() {
        let rows = vec![row(SimMode::full_feedback(), 1); 3];
        match emit_csv(&rows, FailAfter(2)) {
            Err(OutputError::Row { row, .. }) => assert_eq!(row, 1),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            emit_csv(&rows, FailAfter(0)),
            Err(OutputError::Header(_))
        ));
    }
}
