//! The uniform report envelope every subcommand emits. Struct field order
//! and insertion-ordered JSON maps keep the serialized form byte-identical
//! across runs with the same inputs.

use serde::Serialize;
use serde_json::Value;

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

pub fn check(name: impl Into<String>, pass: bool) -> Check {
    Check {
        name: name.into(),
        pass,
    }
}

#[derive(Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub result: Value,
    pub checks: Vec<Check>,
    /// Human-readable rendering for plain output; never serialized.
    #[serde(skip)]
    pub plain: String,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn print(&self, json: bool) {
        if json {
            println!(
                "{}",
                serde_json::to_string_pretty(self).expect("report serializes")
            );
        } else {
            print!("{}", self.plain);
        }
        for c in &self.checks {
            if !c.pass {
                eprintln!("check failed: {}", c.name);
            }
        }
    }
}
