use std::fmt::Write as _;
use std::time::Duration;

use freiman_core::Error;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success = 0,
    Negative = 1,
    Budget = 2,
    InputError = 3,
    Internal = 4,
}

impl Outcome {
    pub fn of_error(e: &Error) -> Outcome {
        match e {
            _ if e.is_budget() => Outcome::Budget,
            Error::VerificationFailed(_) | Error::Numerical(_) => Outcome::Internal,
            _ => Outcome::InputError,
        }
    }

    pub fn status(self) -> &'static str {
        match self {
            Outcome::Success => "ok",
            Outcome::Negative => "negative",
            Outcome::Budget => "budget",
            Outcome::InputError => "input_error",
            Outcome::Internal => "internal_error",
        }
    }
}

/// Report body plus the closing summary line.
#[derive(Debug, Default)]
pub struct Report {
    body: String,
}

impl Report {
    pub fn new(config_json: &str) -> Self {
        Report {
            body: format!("# config {config_json}\n"),
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.body.push_str(s.as_ref());
        self.body.push('\n');
    }

    /// A titled block of lines, such as a set or map in its file format.
    pub fn block(&mut self, title: &str, text: &str) {
        let _ = writeln!(self.body, "[{title}]");
        self.body.push_str(text);
        if !text.ends_with('\n') {
            self.body.push('\n');
        }
    }

    pub fn finish(mut self, timing: Option<Duration>, result: &[(&str, String)]) -> String {
        if let Some(d) = timing {
            let _ = writeln!(self.body, "# elapsed_ms {:.3}", d.as_secs_f64() * 1e3);
        }
        self.body.push_str("RESULT");
        for (k, v) in result {
            let _ = write!(self.body, " {k}={v}");
        }
        self.body.push('\n');
        self.body
    }
}

pub fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}
