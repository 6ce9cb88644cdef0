//! `willchain`: runs scenarios and drives a persisted simulator session.
//!
//! Every command other than `run` works on a state file (a snapshot of the
//! session). `init` creates it; each later command loads it, checks its
//! state hashes, applies one operation and writes it back.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use willchain_core::chain::NATIVE_DENOM;
use willchain_core::codec;
use willchain_core::scenario::{
    bundled, run_scenario, FileRef, ReportRecord, Scenario, ScenarioError, Session, Snapshot,
};
use willchain_core::{Address, Did};

#[derive(Parser)]
#[command(name = "willchain", version, about = "Digital will simulator")]
struct Cli {
    /// Session state file.
    #[arg(
        long,
        global = true,
        env = "WILLCHAIN_STATE",
        default_value = "willchain-state.json"
    )]
    state: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a fresh state file from a scenario header (its steps are ignored).
    Init {
        /// Scenario or genesis file: chain id, params, accounts, topology.
        #[arg(long)]
        genesis: PathBuf,
        /// Topology file; replaces the one named in the genesis file.
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long, env = "WILLCHAIN_SEED")]
        seed: Option<u64>,
    },
    /// Run a scenario file or a bundled scenario to completion.
    Run {
        /// Path to a scenario file, or the name of a bundled scenario.
        scenario: String,
        #[arg(long, env = "WILLCHAIN_SEED")]
        seed: Option<u64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Save the final session as a state file.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Sign and submit a transaction.
    Tx {
        #[command(subcommand)]
        tx: TxCommand,
    },
    /// Produce empty blocks.
    Advance {
        #[arg(long, default_value_t = 1)]
        blocks: u64,
    },
    /// Run relayer rounds; without --steps, until nothing moves.
    Relay {
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Store a file in the vault and print its chunk map.
    StoreFile {
        file: PathBuf,
        #[arg(long)]
        chunk_size: Option<usize>,
        /// Variable name for the file id.
        #[arg(long = "as", default_value = "file")]
        bind: String,
    },
    /// Reassemble a stored file.
    RetrieveFile {
        /// File id (hex) or a `$name` variable.
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reveal a deed component's outer key.
    RevealKey {
        #[arg(long)]
        will: String,
        #[arg(long)]
        component: String,
        /// Name of the temporary key.
        #[arg(long)]
        temporary: String,
    },
    /// Print a state object as JSON.
    Inspect {
        #[command(subcommand)]
        what: Inspect,
    },
    /// Copy the state to or from another file.
    Snapshot {
        #[command(subcommand)]
        action: SnapshotCommand,
    },
}

#[derive(Args)]
struct Signer {
    /// Key name of the sender.
    #[arg(long = "as")]
    who: String,
}

#[derive(Subcommand)]
enum TxCommand {
    CreateWill {
        #[command(flatten)]
        signer: Signer,
        /// Will definition (JSON).
        #[arg(long)]
        will: PathBuf,
        /// Variable name for the new DID.
        #[arg(long, default_value = "will")]
        bind: String,
    },
    Checkin {
        #[command(flatten)]
        signer: Signer,
        #[arg(long)]
        will: String,
    },
    Claim {
        #[command(flatten)]
        signer: Signer,
        #[arg(long)]
        will: String,
        #[arg(long)]
        component: String,
        /// Evidence spec as JSON, e.g. '{"kind":"pedersen","m":1,"r":2}'.
        #[arg(long, default_value = r#"{"kind":"direct"}"#)]
        evidence: String,
    },
    Approve {
        #[command(flatten)]
        signer: Signer,
        #[arg(long)]
        chain: String,
        #[arg(long)]
        contract: String,
    },
    Transfer {
        #[command(flatten)]
        signer: Signer,
        #[arg(long)]
        to: String,
        #[arg(long)]
        amount: u64,
        #[arg(long, default_value = NATIVE_DENOM)]
        denom: String,
    },
}

#[derive(Subcommand)]
enum Inspect {
    Will {
        id: String,
    },
    Token {
        id: String,
    },
    Account {
        address: String,
    },
    /// Native balances, escrow, fee pool, bonds and burns.
    Balances,
    Packets,
    Events,
    Trace,
    Hashes,
    Vars,
}

#[derive(Subcommand)]
enum SnapshotCommand {
    Save { out: PathBuf },
    Load { from: PathBuf },
}

/// An error carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = match e {
            ScenarioError::Input(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

fn not_found(what: &str, id: &str) -> Failure {
    Failure {
        code: 4,
        message: format!("not found: {what} {id}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn execute(cli: Cli) -> Result<u8, Failure> {
    let state = cli.state;
    match cli.command {
        Command::Init {
            genesis,
            topology,
            seed,
        } => {
            let mut scenario = Scenario::load(&genesis)?;
            if let Some(t) = topology {
                let text = read(&t)?;
                let value: Value =
                    codec::from_text(&text).map_err(|e| input(format!("{}: {e}", t.display())))?;
                scenario.topology = Some(FileRef::Inline(value));
            }
            let seed = seed.or(scenario.seed).unwrap_or(0);
            let session = Session::start(&scenario, genesis.parent(), seed)?;
            save(&state, &session)?;
            println!(
                "{}",
                codec::to_canonical(&session.network.chain_hashes()).expect("hashes serialize")
            );
            Ok(0)
        }
        Command::Run {
            scenario,
            seed,
            report,
            snapshot,
        } => {
            let path = Path::new(&scenario);
            let (parsed, base) = if path.exists() {
                (Scenario::load(path)?, path.parent())
            } else if let Some(s) = bundled(&scenario) {
                (s, None)
            } else {
                return Err(input(format!(
                    "no scenario file or bundled scenario named {scenario:?}"
                )));
            };
            let outcome = run_scenario(&parsed, base, seed)?;
            let text = outcome.report();
            match report {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            if let Some(p) = snapshot {
                save(&p, &outcome.session)?;
            }
            if let Some((step, e)) = &outcome.failure {
                eprintln!("step {step} failed: {e}");
            }
            Ok(outcome.exit_code() as u8)
        }
        Command::Tx { tx } => {
            let step = match tx {
                TxCommand::CreateWill { signer, will, bind } => {
                    let text = read(&will)?;
                    let will: Value = codec::from_text(&text)
                        .map_err(|e| input(format!("{}: {e}", will.display())))?;
                    json!({"op": "create_will", "who": signer.who, "as": bind, "will": will})
                }
                TxCommand::Checkin { signer, will } => {
                    json!({"op": "checkin", "who": signer.who, "will": will})
                }
                TxCommand::Claim {
                    signer,
                    will,
                    component,
                    evidence,
                } => {
                    let evidence: Value = serde_json::from_str(&evidence)
                        .map_err(|e| input(format!("evidence: {e}")))?;
                    json!({"op": "claim", "who": signer.who, "will": will, "component": component, "evidence": evidence})
                }
                TxCommand::Approve {
                    signer,
                    chain,
                    contract,
                } => {
                    json!({"op": "approve", "who": signer.who, "chain_id": chain, "address": contract})
                }
                TxCommand::Transfer {
                    signer,
                    to,
                    amount,
                    denom,
                } => {
                    json!({"op": "transfer", "who": signer.who, "to": to, "amount": amount, "denom": denom})
                }
            };
            step_command(&state, step)
        }
        Command::Advance { blocks } => {
            step_command(&state, json!({"op": "advance", "blocks": blocks}))
        }
        Command::Relay { steps } => step_command(&state, json!({"op": "relay", "steps": steps})),
        Command::StoreFile {
            file,
            chunk_size,
            bind,
        } => {
            let bytes =
                std::fs::read(&file).map_err(|e| input(format!("{}: {e}", file.display())))?;
            let content = String::from_utf8(bytes).map_err(|_| {
                input(format!(
                    "{}: only UTF-8 files are supported",
                    file.display()
                ))
            })?;
            step_command(
                &state,
                json!({"op": "store_file", "as": bind, "content": content, "chunk_size": chunk_size}),
            )
        }
        Command::RetrieveFile { id, out } => {
            let session = load(&state)?;
            let id = session
                .expand(&json!(id))?
                .as_str()
                .unwrap_or_default()
                .to_string();
            let bytes = session
                .network
                .home
                .retrieve_file(&id)
                .map_err(|e| Failure::from(ScenarioError::from(e)))?;
            match out {
                Some(p) => std::fs::write(&p, &bytes)
                    .map_err(|e| input(format!("{}: {e}", p.display())))?,
                None => print!("{}", String::from_utf8_lossy(&bytes)),
            }
            Ok(0)
        }
        Command::RevealKey {
            will,
            component,
            temporary,
        } => step_command(
            &state,
            json!({"op": "reveal_key", "will": will, "component": component, "temporary": temporary}),
        ),
        Command::Inspect { what } => {
            let session = load(&state)?;
            let value = inspect(&session, what)?;
            println!(
                "{}",
                codec::to_canonical_pretty(&value).expect("value serializes")
            );
            Ok(0)
        }
        Command::Snapshot { action } => {
            match action {
                SnapshotCommand::Save { out } => {
                    let session = load(&state)?;
                    save(&out, &session)?;
                }
                SnapshotCommand::Load { from } => {
                    let session = load(&from)?;
                    save(&state, &session)?;
                }
            }
            Ok(0)
        }
    }
}

/// Applies one scenario step to the persisted session. The state file is
/// only rewritten when the step succeeds.
fn step_command(state: &Path, step: Value) -> Result<u8, Failure> {
    let mut session = load(state)?;
    let mut records: Vec<ReportRecord> = Vec::new();
    let result = session.run_raw(&step, "cli", &mut records);
    for r in &records {
        println!("{}", codec::to_canonical(r).expect("record serializes"));
    }
    result?;
    save(state, &session)?;
    Ok(0)
}

macro_rules! val {
    ($v:expr) => {
        serde_json::to_value($v).expect("state serializes")
    };
}

fn inspect(session: &Session, what: Inspect) -> Result<Value, Failure> {
    let home = &session.network.home;
    let resolve = |id: &str| -> Result<String, Failure> {
        Ok(session
            .expand(&json!(id))?
            .as_str()
            .unwrap_or_default()
            .to_string())
    };
    Ok(match what {
        Inspect::Will { id } => {
            let id = resolve(&id)?;
            let did: Did = id.parse().map_err(|_| not_found("will", &id))?;
            let will = home.wills.get(&did).ok_or_else(|| not_found("will", &id))?;
            json!({
                "will": val!(will),
                "escrow": home.escrow.get(&did),
                "shares": home.share_ledgers.get(&did),
            })
        }
        Inspect::Token { id } => {
            let id = resolve(&id)?;
            let did: Did = id.parse().map_err(|_| not_found("token", &id))?;
            val!(home
                .tokens
                .get(&did)
                .ok_or_else(|| not_found("token", &id))?)
        }
        Inspect::Account { address } => {
            let address = resolve(&address)?;
            let addr: Address = address
                .parse()
                .map_err(|_| not_found("account", &address))?;
            val!(home
                .account(&addr)
                .ok_or_else(|| not_found("account", &address))?)
        }
        Inspect::Balances => {
            let denom = &home.params.native_denom;
            let accounts: serde_json::Map<String, Value> = home
                .accounts
                .iter()
                .map(|(a, acc)| (a.to_string(), json!(acc.balance(denom))))
                .collect();
            let escrow: u64 = home.escrow.values().filter_map(|e| e.get(denom)).sum();
            json!({
                "denom": denom,
                "accounts": accounts,
                "escrow": escrow,
                "fee_pool": home.fee_pool,
                "bonded": home.bonded,
                "burned": home.burned,
                "accounted": home.native_accounted().to_string(),
                "genesis_supply": home.genesis_supply,
                "conserved": home.conserves_supply(),
            })
        }
        Inspect::Packets => json!({
            "home": val!(&home.packets),
            "destinations": session
                .network
                .destinations
                .iter()
                .map(|(id, d)| (id.clone(), val!(&d.packets)))
                .collect::<serde_json::Map<_, _>>(),
        }),
        Inspect::Events => val!(&home.events),
        Inspect::Trace => val!(&session.network.trace),
        Inspect::Hashes => val!(&session.network.chain_hashes()),
        Inspect::Vars => val!(&session.vars),
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Session, Failure> {
    let text = read(path)?;
    Ok(Snapshot::from_text(&text)?)
}

fn save(path: &Path, session: &Session) -> Result<(), Failure> {
    write(path, &Snapshot::capture(session).to_text())
}
