//! Instance file format, report assembly, and locale-independent number
//! formatting: the reproducibility surface of the crate.
//!
//! Instance files are line-oriented with `#` comments:
//!
//! ```text
//! mode limited        # or: mode unlimited
//! r 100               # required iff limited
//! liar 1              # 1-based agent index
//! agent 1: 17.67 12.58 4.35 12.00 5.47 0.77 14.57 3.49 16.55 12.504
//! agent 2: ...
//! truth 1: ...        # the liar's true row; defaults to its agent row
//! ```
//!
//! Reports are `#`-prefixed metadata lines (command, config, seed, solver,
//! version) followed by a rectangular CSV data section. Reports carry no
//! timestamps, so identical commands reproduce identical bytes.

use rand::Rng;

use crate::deception::renormalize_limited;
use crate::error::{Error, Result};
use crate::model::{Mode, PreferenceProfile, ProblemInstance, EPS, MAX_VALUE};
use crate::rng::substream;

/// Crate version recorded in report metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Substream tag for instance generation ("gen" in ASCII).
const GEN_TAG: u64 = 0x67_65_6e;

/// Draw a random instance: entries i.i.d. Uniform(ε, 100−ε) per agent row,
/// renormalized to the row-sum target in limited mode. Agent 1 is the liar
/// and its truth equals its stated row.
pub fn random_instance(
    n_agents: usize,
    m_resources: usize,
    mode: Mode,
    seed: u64,
) -> Result<ProblemInstance> {
    if n_agents == 0 || m_resources == 0 {
        return Err(Error::Config(format!(
            "instance generation needs at least one agent and one resource, got {n_agents}x{m_resources}"
        )));
    }
    if let Mode::Limited { r } = mode {
        let lo = EPS * m_resources as f64;
        let hi = MAX_VALUE * m_resources as f64;
        if !(lo..=hi).contains(&r) {
            return Err(Error::Config(format!(
                "sum target {r} infeasible for {m_resources} values in [{EPS}, {MAX_VALUE}]"
            )));
        }
    }
    let mut rng = substream(seed, &[GEN_TAG]);
    let mut rows = Vec::with_capacity(n_agents);
    for _ in 0..n_agents {
        let row: Vec<f64> = (0..m_resources).map(|_| rng.gen_range(EPS..MAX_VALUE)).collect();
        rows.push(match mode {
            Mode::Unlimited => row,
            Mode::Limited { r } => renormalize_limited(&row, &[], r)?,
        });
    }
    let truth = rows[0].clone();
    Ok(ProblemInstance { profile: PreferenceProfile { rows, mode }, liar: 0, truth })
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Tokens of `line` with their 1-based column positions; `#` starts a
/// comment.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let effective = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (col, (i, ch)) in (1..).zip(effective.char_indices()) {
        if ch.is_whitespace() {
            if let Some((s, c)) = start.take() {
                out.push((c, &effective[s..i]));
            }
        } else if start.is_none() {
            start = Some((i, col));
        }
    }
    if let Some((s, c)) = start {
        out.push((c, &effective[s..]));
    }
    out
}

fn parse_f64(lineno: usize, col: usize, token: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| parse_err(lineno, col, format!("expected a number, found '{token}'")))
}

fn parse_index(lineno: usize, col: usize, token: &str) -> Result<usize> {
    let raw: u64 = token
        .parse()
        .map_err(|_| parse_err(lineno, col, format!("expected a positive integer, found '{token}'")))?;
    if raw == 0 {
        return Err(parse_err(lineno, col, "indices are 1-based; 0 is not valid"));
    }
    Ok((raw - 1) as usize)
}

/// Parse the instance format; syntactic checks only.
///
/// Returns positioned diagnostics on malformed input. Invariant checking
/// (ranges, sums) is left to [`crate::model::validate_instance`] so the
/// caller can pick a tolerance.
pub fn parse_instance(text: &str) -> Result<ProblemInstance> {
    let mut mode: Option<(usize, Mode)> = None;
    let mut r: Option<(usize, f64)> = None;
    let mut liar: Option<usize> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut truth: Option<(usize, Vec<f64>)> = None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let (kcol, keyword) = toks[0];
        match keyword {
            "mode" => {
                if mode.is_some() {
                    return Err(parse_err(lineno, kcol, "duplicate mode line"));
                }
                let (vcol, value) = *toks
                    .get(1)
                    .ok_or_else(|| parse_err(lineno, kcol, "mode requires a value"))?;
                let parsed = match value {
                    "unlimited" => Mode::Unlimited,
                    // The r value is patched in after the whole header is read.
                    "limited" => Mode::Limited { r: f64::NAN },
                    other => {
                        return Err(parse_err(
                            lineno,
                            vcol,
                            format!("mode must be 'unlimited' or 'limited', found '{other}'"),
                        ))
                    }
                };
                expect_end(lineno, &toks, 2)?;
                mode = Some((lineno, parsed));
            }
            "r" => {
                if r.is_some() {
                    return Err(parse_err(lineno, kcol, "duplicate r line"));
                }
                let (vcol, value) = *toks
                    .get(1)
                    .ok_or_else(|| parse_err(lineno, kcol, "r requires a value"))?;
                let parsed = parse_f64(lineno, vcol, value)?;
                if parsed.is_nan() || parsed <= 0.0 {
                    return Err(parse_err(lineno, vcol, format!("r must be positive, found {value}")));
                }
                expect_end(lineno, &toks, 2)?;
                r = Some((lineno, parsed));
            }
            "liar" => {
                if liar.is_some() {
                    return Err(parse_err(lineno, kcol, "duplicate liar line"));
                }
                let (vcol, value) = *toks
                    .get(1)
                    .ok_or_else(|| parse_err(lineno, kcol, "liar requires a 1-based agent index"))?;
                expect_end(lineno, &toks, 2)?;
                liar = Some(parse_index(lineno, vcol, value)?);
            }
            "agent" | "truth" => {
                let (vcol, value) = *toks
                    .get(1)
                    .ok_or_else(|| parse_err(lineno, kcol, format!("{keyword} requires an index")))?;
                let index_token = value.strip_suffix(':').unwrap_or(value);
                let index = parse_index(lineno, vcol, index_token)?;
                let mut values = Vec::new();
                let mut rest = &toks[2..];
                // Accept both "agent 1: v..." and "agent 1 : v...".
                if let Some(&(_, ":")) = rest.first() {
                    rest = &rest[1..];
                }
                for &(col, tok) in rest {
                    values.push(parse_f64(lineno, col, tok)?);
                }
                if values.is_empty() {
                    return Err(parse_err(lineno, kcol, format!("{keyword} row has no values")));
                }
                if keyword == "agent" {
                    if index != rows.len() {
                        return Err(parse_err(
                            lineno,
                            vcol,
                            format!("expected agent {} here, found agent {}", rows.len() + 1, index + 1),
                        ));
                    }
                    rows.push(values);
                } else {
                    if truth.is_some() {
                        return Err(parse_err(lineno, kcol, "duplicate truth line"));
                    }
                    truth = Some((lineno, values));
                    liar_matches_truth(lineno, vcol, liar, index)?;
                }
            }
            other => {
                return Err(parse_err(
                    lineno,
                    kcol,
                    format!("unknown keyword '{other}' (expected mode, r, liar, agent, or truth)"),
                ));
            }
        }
    }

    let lines = text.lines().count().max(1);
    let (mode_line, mut mode) = mode.ok_or_else(|| parse_err(lines, 1, "missing mode line"))?;
    match (&mut mode, r) {
        (Mode::Limited { r: slot }, Some((_, value))) => *slot = value,
        (Mode::Limited { .. }, None) => {
            return Err(parse_err(mode_line, 1, "limited mode requires an r line"));
        }
        (Mode::Unlimited, Some((r_line, _))) => {
            return Err(parse_err(r_line, 1, "r is only meaningful in limited mode"));
        }
        (Mode::Unlimited, None) => {}
    }
    let liar = liar.ok_or_else(|| parse_err(lines, 1, "missing liar line"))?;
    if rows.is_empty() {
        return Err(parse_err(lines, 1, "no agent rows"));
    }
    let m = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(parse_err(
                lines,
                1,
                format!("agent {} has {} values but agent 1 has {m}", i + 1, row.len()),
            ));
        }
    }
    let truth = match truth {
        Some((t_line, values)) => {
            if values.len() != m {
                return Err(parse_err(
                    t_line,
                    1,
                    format!("truth row has {} values but agents have {m}", values.len()),
                ));
            }
            values
        }
        None => rows
            .get(liar)
            .cloned()
            .ok_or_else(|| parse_err(lines, 1, format!("liar {} has no agent row", liar + 1)))?,
    };
    Ok(ProblemInstance {
        profile: PreferenceProfile { rows, mode },
        liar,
        truth,
    })
}

fn expect_end(lineno: usize, toks: &[(usize, &str)], after: usize) -> Result<()> {
    if let Some(&(col, tok)) = toks.get(after) {
        return Err(parse_err(lineno, col, format!("unexpected trailing token '{tok}'")));
    }
    Ok(())
}

fn liar_matches_truth(lineno: usize, col: usize, liar: Option<usize>, index: usize) -> Result<()> {
    match liar {
        Some(l) if l != index => Err(parse_err(
            lineno,
            col,
            format!("truth row is for agent {} but the liar is agent {}", index + 1, l + 1),
        )),
        _ => Ok(()),
    }
}

/// Serialize an instance in the format [`parse_instance`] accepts.
///
/// Values use Rust's shortest-roundtrip float display, so
/// parse(emit(inst)) == inst exactly.
pub fn emit_instance(inst: &ProblemInstance) -> String {
    let mut out = String::new();
    match inst.profile.mode {
        Mode::Unlimited => out.push_str("mode unlimited\n"),
        Mode::Limited { r } => {
            out.push_str("mode limited\n");
            out.push_str(&format!("r {r}\n"));
        }
    }
    out.push_str(&format!("liar {}\n", inst.liar + 1));
    for (i, row) in inst.profile.rows.iter().enumerate() {
        out.push_str(&format!("agent {}: {}\n", i + 1, join_values(row)));
    }
    out.push_str(&format!("truth {}: {}\n", inst.liar + 1, join_values(&inst.truth)));
    out
}

fn join_values(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

/// Format `x` with `sig` significant digits, trailing zeros trimmed:
/// fixed notation for exponents in [-4, sig), scientific otherwise.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sig = sig.max(1);
    // Round first in scientific form to learn the decided exponent.
    let sci = format!("{:.*e}", sig - 1, x);
    let exp: i32 = sci[sci.find('e').expect("always present") + 1..]
        .parse()
        .expect("exponent is an integer");
    if exp >= -4 && exp < sig as i32 {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_zeros(&fixed)
    } else {
        let mantissa = trim_zeros(&sci[..sci.find('e').expect("always present")]);
        format!("{mantissa}e{exp}")
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// A report: metadata lines plus one rectangular CSV data section.
#[derive(Debug, Clone)]
pub struct Report {
    metadata: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut report = Report { metadata: Vec::new(), columns: Vec::new(), rows: Vec::new() };
        report.meta("command", command);
        report.meta("version", VERSION);
        report
    }

    /// Append one metadata line.
    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    /// Set the CSV header.
    pub fn columns(&mut self, names: &[&str]) -> &mut Self {
        self.columns = names.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Append one data row; must match the header width.
    pub fn row(&mut self, cells: &[String]) -> &mut Self {
        assert_eq!(cells.len(), self.columns.len(), "ragged report row");
        self.rows.push(cells.to_vec());
        self
    }

    /// Render the report: `# key: value` lines, a header, then data rows.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            out.push_str(&format!("# {key}: {value}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// The non-`#` lines of a rendered report: header plus data rows.
pub fn data_section(report_text: &str) -> String {
    report_text
        .lines()
        .filter(|line| !line.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parse a whitespace/comma-separated vector of numbers; `#` comments and
/// blank lines allowed.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.replace(',', " ");
        for (col, tok) in tokens(&line) {
            values.push(parse_f64(i + 1, col, tok)?);
        }
    }
    if values.is_empty() {
        return Err(parse_err(1, 1, "no numbers found"));
    }
    Ok(values)
}

/// Render owner indices 1-based, space-separated, for reports.
pub fn owners_one_based(owner: &[usize]) -> String {
    owner.iter().map(|a| (a + 1).to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EPS;

    const SAMPLE: &str = "\
# example instance
mode limited
r 100
liar 1
agent 1: 30 30 40   # inline comment
agent 2: 25 25 50
truth 1: 20 40 40
";

    #[test]
    fn parses_the_documented_format() {
        let inst = parse_instance(SAMPLE).unwrap();
        assert_eq!(inst.profile.mode, Mode::Limited { r: 100.0 });
        assert_eq!(inst.liar, 0);
        assert_eq!(inst.profile.rows.len(), 2);
        assert_eq!(inst.profile.rows[1], vec![25.0, 25.0, 50.0]);
        assert_eq!(inst.truth, vec![20.0, 40.0, 40.0]);
    }

    #[test]
    fn truth_defaults_to_the_liar_row() {
        let text = "mode unlimited\nliar 2\nagent 1: 1 2\nagent 2: 3 4\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.liar, 1);
        assert_eq!(inst.truth, vec![3.0, 4.0]);
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let text = "mode unlimited\nliar 1\nagent 1: 1 oops 3\n";
        match parse_instance(text) {
            Err(Error::Parse { line, col, msg }) => {
                assert_eq!(line, 3);
                assert_eq!(col, 12);
                assert!(msg.contains("oops"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn row_length_mismatch_is_positioned() {
        let text = "mode unlimited\nliar 1\nagent 1: 1 2 3\nagent 2: 1 2\n";
        assert!(matches!(parse_instance(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn missing_r_in_limited_mode_is_rejected() {
        let text = "mode limited\nliar 1\nagent 1: 50 50\n";
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("requires an r line"), "{err}");
    }

    #[test]
    fn r_in_unlimited_mode_is_rejected() {
        let text = "mode unlimited\nr 100\nliar 1\nagent 1: 50 50\n";
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn agents_must_be_in_order() {
        let text = "mode unlimited\nliar 1\nagent 2: 1 2\n";
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn truth_for_the_wrong_agent_is_rejected() {
        let text = "mode unlimited\nliar 1\nagent 1: 1 2\nagent 2: 3 4\ntruth 2: 3 4\n";
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("liar is agent 1"), "{err}");
    }

    #[test]
    fn unknown_keywords_are_rejected() {
        let text = "mode unlimited\nliar 1\nwidth 3\nagent 1: 1 2\n";
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn emit_then_parse_round_trips() {
        let inst = ProblemInstance {
            profile: PreferenceProfile {
                rows: vec![vec![17.67, 12.504, EPS], vec![0.1 + 0.2, 50.0, 3.06]],
                mode: Mode::Unlimited,
            },
            liar: 1,
            truth: vec![1.0 / 3.0, 2.0 / 3.0, 99.999999],
        };
        let text = emit_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn sig_formatting_matches_expectations() {
        assert_eq!(fmt_sig(183.68, 6), "183.68");
        assert_eq!(fmt_sig(183.89999999999998, 6), "183.9");
        assert_eq!(fmt_sig(-59.05000000000004, 6), "-59.05");
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(100.0, 6), "100");
        assert_eq!(fmt_sig(0.003021028729390858, 6), "0.00302103");
        assert_eq!(fmt_sig(1e-6, 6), "1e-6");
        assert_eq!(fmt_sig(1234567.0, 6), "1.23457e6");
        assert_eq!(fmt_sig(999999.5, 6), "1e6");
        assert_eq!(fmt_sig(-0.000012345, 6), "-1.2345e-5");
        assert_eq!(fmt_sig(206.99999999999997, 6), "207");
    }

    #[test]
    fn reports_render_metadata_then_csv() {
        let mut report = Report::new("solve");
        report.meta("solver", "exact");
        report.columns(&["agent", "utility"]);
        report.row(&["1".into(), "204.76".into()]);
        let text = report.render();
        assert!(text.starts_with("# command: solve\n"));
        assert!(text.contains(&format!("# version: {VERSION}\n")));
        assert!(text.ends_with("agent,utility\n1,204.76\n"));
        assert_eq!(data_section(&text), "agent,utility\n1,204.76");
    }

    #[test]
    fn vectors_parse_from_loose_text() {
        let v = parse_vector("1.5, 2.5 3\n# comment\n4\n").unwrap();
        assert_eq!(v, vec![1.5, 2.5, 3.0, 4.0]);
        assert!(parse_vector("# nothing\n").is_err());
        assert!(parse_vector("1 two 3").is_err());
    }

    #[test]
    fn owners_render_one_based() {
        assert_eq!(owners_one_based(&[3, 1, 0, 2]), "4 2 1 3");
    }

    #[test]
    fn random_instances_are_deterministic_and_in_range() {
        let a = random_instance(4, 10, Mode::Unlimited, 7).unwrap();
        let b = random_instance(4, 10, Mode::Unlimited, 7).unwrap();
        assert_eq!(a, b);
        let c = random_instance(4, 10, Mode::Unlimited, 8).unwrap();
        assert_ne!(a, c);
        for row in &a.profile.rows {
            assert!(row.iter().all(|&v| (EPS..=100.0 - EPS).contains(&v)));
        }
        assert_eq!(a.liar, 0);
        assert_eq!(a.truth, a.profile.rows[0]);
    }

    #[test]
    fn random_limited_instances_hit_the_sum_target() {
        let inst = random_instance(3, 6, Mode::Limited { r: 100.0 }, 42).unwrap();
        for row in &inst.profile.rows {
            assert!((row.iter().sum::<f64>() - 100.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn degenerate_generation_requests_are_rejected() {
        assert!(random_instance(0, 5, Mode::Unlimited, 1).is_err());
        assert!(random_instance(2, 0, Mode::Unlimited, 1).is_err());
        assert!(random_instance(2, 3, Mode::Limited { r: 1e-9 }, 1).is_err());
    }
}
