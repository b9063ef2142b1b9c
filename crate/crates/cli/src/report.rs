//! Deterministic report assembly.
//!
//! Every command produces a [`Report`]: human-readable lines plus a flat
//! key-value view for `--machine` output. Values are emitted in insertion
//! order and all data sources are canonically ordered, so two runs on the
//! same input are byte-identical.
//!
//! Machine format: first line `schema=1`, then one `key=value` pair per
//! line, ending with `status=pass|refuted`. Exit codes: 0 pass, 1 refuted
//! (a witness is always included), 2 input error.

/// Outcome of a command's checks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Pass,
    Refuted,
}

#[derive(Clone, Debug)]
pub struct Report {
    command: String,
    pairs: Vec<(String, String)>,
    lines: Vec<String>,
    status: Status,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            pairs: Vec::new(),
            lines: Vec::new(),
            status: Status::Pass,
        }
    }

    pub fn refute(&mut self) {
        self.status = Status::Refuted;
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// Adds a machine key-value pair.
    pub fn kv(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.pairs.push((key.into(), value.into()));
    }

    /// Adds a human-readable line.
    pub fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Pass => 0,
            Status::Refuted => 1,
        }
    }

    pub fn render(&self, machine: bool) -> String {
        if machine {
            let mut out = String::from("schema=1\n");
            out.push_str(&format!("command={}\n", self.command));
            for (k, v) in &self.pairs {
                out.push_str(&format!("{k}={v}\n"));
            }
            out.push_str(&format!(
                "status={}\n",
                match self.status {
                    Status::Pass => "pass",
                    Status::Refuted => "refuted",
                }
            ));
            out
        } else {
            let mut out = String::new();
            for line in &self.lines {
                out.push_str(line);
                out.push('\n');
            }
            out.push_str(&format!(
                "status: {}\n",
                match self.status {
                    Status::Pass => "pass",
                    Status::Refuted => "refuted",
                }
            ));
            out
        }
    }
}
