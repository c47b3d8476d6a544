use crate::sim::IndicatorFrame;

pub const INDICATOR_CSV_HEADER: &str =
    "step,gdp_growth,inflation,unemployment,trade_balance,economic_resistance,actions";

/// Formats a real with 9 significant digits using the rules of C's `%.9g`:
/// fixed notation for decimal exponents in `-4..9`, scientific otherwise,
/// trailing zeros removed. Negative zero prints as `0`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn indicator_csv_row(f: &IndicatorFrame) -> String {
    let actions: Vec<String> = f.actions.iter().map(|a| format!("{}:{}", a.kind, format_sig9(a.magnitude))).collect();
    format!(
        "{},{},{},{},{},{},{}",
        f.step,
        format_sig9(f.gdp_growth),
        format_sig9(f.inflation),
        format_sig9(f.unemployment),
        format_sig9(f.trade_balance),
        format_sig9(f.economic_resistance),
        actions.join(";")
    )
}

/// Header plus one LF-terminated row per frame.
pub fn write_indicator_csv(frames: &[IndicatorFrame]) -> Vec<u8> {
    let mut out = String::with_capacity(64 * (frames.len() + 1));
    out.push_str(INDICATOR_CSV_HEADER);
    out.push('\n');
    for f in frames {
        out.push_str(&indicator_csv_row(f));
        out.push('\n');
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{ActionKind, PolicyAction};

    #[test]
    fn sig9_matches_printf() {
        // expected strings produced by printf("%.9g")
        let cases = [
            (1.0, "1"),
            (100.0, "100"),
            (-0.0, "0"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333"),
            (-2.0 / 3.0, "-0.666666667"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (9999999999.0, "1e+10"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (0.000123456789123, "0.000123456789"),
            (99999999.95, "100000000"),
            (1e-300, "1e-300"),
            (-1.5e21, "-1.5e+21"),
            (2.5e-9, "2.5e-09"),
            (0.05, "0.05"),
            (1.25, "1.25"),
        ];
        for (v, want) in cases {
            assert_eq!(format_sig9(v), want, "{v:e}");
        }
    }

    fn frame(actions: Vec<PolicyAction>) -> IndicatorFrame {
        IndicatorFrame {
            step: 3,
            gdp_growth: 0.02,
            inflation: 0.015,
            unemployment: 0.05,
            trade_balance: -12.5,
            economic_resistance: 1.2,
            actions,
        }
    }

    #[test]
    fn empty_frames_header_only() {
        assert_eq!(write_indicator_csv(&[]), format!("{INDICATOR_CSV_HEADER}\n").into_bytes());
    }

    #[test]
    fn no_actions_trailing_empty_field() {
        let text = String::from_utf8(write_indicator_csv(&[frame(vec![])])).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "3,0.02,0.015,0.05,-12.5,1.2,");
    }

    #[test]
    fn actions_field() {
        let a = |kind, magnitude| PolicyAction { kind, magnitude, target_sectors: vec![0], target_agents: vec![0] };
        let text = String::from_utf8(write_indicator_csv(&[frame(vec![
            a(ActionKind::Spending, 100.0),
            a(ActionKind::TaxCut, 50.0),
        ])]))
        .unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",spending:100;tax_cut:50"));
    }
}
