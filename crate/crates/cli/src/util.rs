use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use essq::{StateRequest, TwoModeState, C64};
use serde::Serialize;

/// Failure classes, mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Output(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

impl From<essq::Error> for CliError {
    fn from(e: essq::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Reads JSON given either inline (starting with `{`) or as a file path.
pub fn read_json_arg(arg: &str) -> CliResult<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| invalid(format!("cannot read {arg}: {e}")))
}

/// The state request from `--state`, with `--cutoff` taking precedence.
pub fn state_request(arg: Option<&str>, default: Option<&str>, cutoff: Option<usize>) -> CliResult<StateRequest> {
    let text = match (arg, default) {
        (Some(a), _) => read_json_arg(a)?,
        (None, Some(d)) => d.to_string(),
        (None, None) => return Err(invalid("--state is required")),
    };
    let mut req = StateRequest::from_json(&text).map_err(|e| invalid(format!("state JSON: {e}")))?;
    req.spec.validate()?;
    if let Some(c) = cutoff {
        req.cutoff = Some(c as i64);
    }
    let resolved = req.resolve_cutoff(None)?;
    req.cutoff = Some(resolved as i64);
    Ok(req)
}

pub fn build_state(req: &StateRequest) -> CliResult<TwoModeState> {
    Ok(req.build(None)?)
}

pub fn parse_f64(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let v: f64 = match s {
        "sqrt2" => 2f64.sqrt(),
        "sqrt3" => 3f64.sqrt(),
        _ => s.parse().map_err(|_| invalid(format!("not a number: {s:?}")))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("not finite: {s:?}")))
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> CliResult<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(parse_f64(&s)?, 0.0));
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_f64(&body[..i])?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => parse_f64(x)?,
    };
    Ok(C64::new(re, im))
}

/// Comma-separated list or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let a = parse_f64(parts[0])?;
        let b = parse_f64(parts[1])?;
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad count in range {s:?}")))?;
        return match n {
            0 => Err(invalid("range count must be positive")),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
        };
    }
    s.split(',').map(parse_f64).collect()
}

pub fn parse_complex_list(s: &str) -> CliResult<Vec<C64>> {
    if s.matches(':').count() == 2 {
        return Ok(parse_list(s)?.into_iter().map(|x| C64::new(x, 0.0)).collect());
    }
    s.split(',').map(parse_complex).collect()
}

pub fn parse_vec3(s: &str) -> CliResult<[f64; 3]> {
    let v = s.split(',').map(parse_f64).collect::<CliResult<Vec<_>>>()?;
    <[f64; 3]>::try_from(v).map_err(|_| invalid(format!("expected x,y,z, got {s:?}")))
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV output with fixed columns and full-precision numbers.
pub struct Csv {
    w: BufWriter<File>,
    path: PathBuf,
}

impl Csv {
    pub fn create(path: PathBuf, header: &[&str], timestamp: bool) -> CliResult<Self> {
        let file = File::create(&path).map_err(|e| out_err(&path, e))?;
        let mut csv = Self {
            w: BufWriter::new(file),
            path,
        };
        if timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            csv.line(&format!("# generated_unix={secs}"))?;
        }
        csv.line(&header.join(","))?;
        Ok(csv)
    }

    pub fn row(&mut self, cells: &[String]) -> CliResult<()> {
        self.line(&cells.join(","))
    }

    fn line(&mut self, s: &str) -> CliResult<()> {
        writeln!(self.w, "{s}").map_err(|e| out_err(&self.path, e))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.w.flush().map_err(|e| out_err(&self.path, e))
    }
}

pub fn out_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

pub fn prepare_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| out_err(dir, e))
}

pub fn write_json<T: Serialize>(path: PathBuf, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| out_err(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| out_err(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1.5").unwrap(), C64::new(1.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("1-0.5i").unwrap(), C64::new(1.0, -0.5));
        assert_eq!(parse_complex("1e-3+2e-2i").unwrap(), C64::new(1e-3, 2e-2));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn exit_code_classes() {
        let numeric = CliError::from(essq::Error::NegativeProbability { i: 0, j: 1, value: -1e-3 });
        assert_eq!(numeric.exit_code(), 3);
        assert_eq!(CliError::from(essq::Error::ZeroVector).exit_code(), 2);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_list("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_list("1,2").unwrap(), vec![1.0, 2.0]);
        assert!(parse_list("0:1:0").is_err());
        assert_eq!(parse_vec3("0,0,1").unwrap(), [0.0, 0.0, 1.0]);
        assert!(parse_vec3("0,1").is_err());
    }
}
