use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

/// One violated check: the inputs identify it exactly, so every failure
/// is reproducible in isolation.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub check: String,
    pub q: u32,
    pub input: String,
    pub expected: String,
    pub actual: String,
}

/// Outcome of one verification suite. A suite passed iff `failures` is
/// empty; all failures are collected, not just the first.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite_name: String,
    pub q_range: Vec<u32>,
    pub parameters: BTreeMap<String, String>,
    pub checks_run: u64,
    pub failures: Vec<Failure>,
    pub elapsed_ms: u64,
    /// Advisory suites (statistical) do not gate exit codes; the exact
    /// suites are authoritative.
    pub advisory: bool,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Combines per-q reports of the same suite into one.
    pub fn merged(
        suite_name: &str,
        q_range: Vec<u32>,
        parameters: BTreeMap<String, String>,
        parts: Vec<SuiteReport>,
    ) -> SuiteReport {
        let mut checks_run = 0;
        let mut failures = Vec::new();
        let mut elapsed_ms = 0;
        let advisory = parts.iter().all(|p| p.advisory) && !parts.is_empty();
        for p in parts {
            checks_run += p.checks_run;
            failures.extend(p.failures);
            elapsed_ms += p.elapsed_ms;
        }
        failures.sort_by(|a, b| (&a.check, a.q, &a.input).cmp(&(&b.check, b.q, &b.input)));
        SuiteReport {
            suite_name: suite_name.to_string(),
            q_range,
            parameters,
            checks_run,
            failures,
            elapsed_ms,
            advisory,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut()
            .expect("report is an object")
            .insert("passed".into(), serde_json::Value::Bool(self.passed()));
        v
    }

    /// Human-readable rendering; shows at most `max_failures` failure
    /// lines (the JSON form always carries all of them).
    pub fn render_text(&self, max_failures: usize) -> String {
        let mut out = String::new();
        let qs: Vec<String> = self.q_range.iter().map(|q| q.to_string()).collect();
        let _ = writeln!(out, "suite:    {}", self.suite_name);
        let _ = writeln!(out, "q:        {}", qs.join(","));
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "param:    {k}={v}");
        }
        let _ = writeln!(out, "checks:   {}", self.checks_run);
        let _ = writeln!(out, "failures: {}", self.failures.len());
        let _ = writeln!(out, "elapsed:  {} ms", self.elapsed_ms);
        for f in self.failures.iter().take(max_failures) {
            let _ = writeln!(
                out,
                "  FAIL {} q={} [{}] expected {} got {}",
                f.check, f.q, f.input, f.expected, f.actual
            );
        }
        if self.failures.len() > max_failures {
            let _ = writeln!(
                out,
                "  ... and {} more failures",
                self.failures.len() - max_failures
            );
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let advisory = if self.advisory { " (advisory)" } else { "" };
        let _ = writeln!(out, "{verdict}{advisory}");
        out
    }
}

/// Accumulates one suite run and stamps the elapsed time at the end.
pub(crate) struct ReportBuilder {
    suite_name: String,
    q_range: Vec<u32>,
    parameters: BTreeMap<String, String>,
    checks_run: u64,
    failures: Vec<Failure>,
    advisory: bool,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(suite_name: &str, q_range: Vec<u32>) -> Self {
        ReportBuilder {
            suite_name: suite_name.to_string(),
            q_range,
            parameters: BTreeMap::new(),
            checks_run: 0,
            failures: Vec::new(),
            advisory: false,
            start: Instant::now(),
        }
    }

    pub fn advisory(mut self) -> Self {
        self.advisory = true;
        self
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn add_checks(&mut self, n: u64) {
        self.checks_run += n;
    }

    pub fn extend_failures(&mut self, fs: Vec<Failure>) {
        self.failures.extend(fs);
    }

    pub fn finish(mut self) -> SuiteReport {
        self.failures
            .sort_by(|a, b| (&a.check, a.q, &a.input).cmp(&(&b.check, b.q, &b.input)));
        SuiteReport {
            suite_name: self.suite_name,
            q_range: self.q_range,
            parameters: self.parameters,
            checks_run: self.checks_run,
            failures: self.failures,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
            advisory: self.advisory,
        }
    }
}
