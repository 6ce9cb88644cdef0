//! Scenario files and the session that executes them.
//!
//! A scenario names its accounts, describes genesis and topology, and lists
//! steps: transactions, block advances, relayer rounds, vault operations
//! and checks. Keys, nonces and any generated bytes derive from the
//! scenario seed, so equal seeds give byte-identical reports.
//!
//! String values inside steps, genesis and topology are expanded before
//! use:
//!
//! | form              | expands to                                   |
//! |-------------------|----------------------------------------------|
//! | `@name`           | address of the seed-derived key `name`       |
//! | `@name.pk`        | its public key                               |
//! | `@commit:m:r`     | Pedersen commitment to integers `m`, `r`     |
//! | `@sighash:name`   | hash of `name`'s signature-proof signature   |
//! | `$var`            | a value bound by an earlier step (DIDs, files) |

mod bundled;
mod session;
mod steps;

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::chain::{ChainError, ChainParams};
use crate::codec;

pub use bundled::{bundled, BUNDLED};
pub use session::{Session, Snapshot};
pub use steps::{Check, EvidenceSpec, Step, StepEntry};

#[derive(Debug, Clone, Error)]
pub enum ScenarioError {
    #[error("input error: {0}")]
    Input(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

impl ScenarioError {
    pub fn input(msg: impl Into<String>) -> Self {
        ScenarioError::Input(msg.into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountSpec {
    pub name: String,
    #[serde(default)]
    pub balances: BTreeMap<String, u64>,
    /// Name of the account that pays this one's fees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sponsor: Option<String>,
    /// Registers a possession proof at genesis so the key can sign
    /// aggregates.
    #[serde(default)]
    pub register_key: bool,
}

/// A file inline or by path relative to the scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FileRef {
    Path(String),
    Inline(Value),
}

impl FileRef {
    pub fn load(&self, base: Option<&FsPath>) -> Result<Value, ScenarioError> {
        match self {
            FileRef::Inline(v) => Ok(v.clone()),
            FileRef::Path(p) => {
                let full = base.map_or_else(|| FsPath::new(p).to_path_buf(), |b| b.join(p));
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| ScenarioError::input(format!("{}: {e}", full.display())))?;
                codec::from_text(&text)
                    .map_err(|e| ScenarioError::input(format!("{}: {e}", full.display())))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_chain_id")]
    pub chain_id: String,
    #[serde(default)]
    pub params: ChainParams,
    #[serde(default)]
    pub accounts: Vec<AccountSpec>,
    /// Extra genesis accounts in the raw genesis-account format.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genesis: Option<FileRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<FileRef>,
    #[serde(default)]
    pub steps: Vec<Value>,
}

fn default_chain_id() -> String {
    "willchain-1".to_string()
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        codec::from_text(text).map_err(|e| ScenarioError::input(format!("scenario: {e}")))
    }

    pub fn load(path: &FsPath) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub step: String,
    pub op: String,
    pub status: String,
    pub detail: String,
    pub height: u64,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub records: Vec<ReportRecord>,
    pub session: Session,
    /// The step that failed, with its error.
    pub failure: Option<(String, ScenarioError)>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match &self.failure {
            None => 0,
            Some((_, ScenarioError::Input(_))) => 3,
            Some(_) => 2,
        }
    }

    /// Line-delimited records followed by a summary line.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&codec::to_canonical(r).expect("record serializes"));
            out.push('\n');
        }
        let summary = serde_json::json!({
            "summary": {
                "status": if self.failure.is_none() { "ok" } else { "failed" },
                "failed_step": self.failure.as_ref().map(|(s, _)| s.clone()),
                "steps": self.records.len(),
                "height": self.session.network.home.height,
                "state_hashes": self.session.network.chain_hashes(),
            }
        });
        out.push_str(&codec::to_canonical(&summary).expect("summary serializes"));
        out.push('\n');
        out
    }
}

/// Runs a whole scenario. `seed` overrides the scenario's own seed.
pub fn run_scenario(
    scenario: &Scenario,
    base: Option<&FsPath>,
    seed: Option<u64>,
) -> Result<Outcome, ScenarioError> {
    let seed = seed.or(scenario.seed).unwrap_or(0);
    let session = Session::start(scenario, base, seed)?;
    Ok(resume(session, &scenario.steps, 0))
}

/// Runs `steps` on an existing session, numbering them from `offset`.
pub fn resume(mut session: Session, steps: &[Value], offset: usize) -> Outcome {
    let mut records = Vec::new();
    let mut failure = None;
    for (i, raw) in steps.iter().enumerate() {
        let label = format!("{}", offset + i);
        match session.run_raw(raw, &label, &mut records) {
            Ok(()) => {}
            Err(e) => {
                failure = Some((label, e));
                break;
            }
        }
    }
    Outcome {
        records,
        session,
        failure,
    }
}
