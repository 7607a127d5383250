use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;
use queryarena::registry::{read_questions, ProfileDetails, Registry, RegistryConfig, SystemClock};
use queryarena_server::{serve, AppState};
use tracing_subscriber::EnvFilter;

/// Runs the queryarena HTTP/WebSocket server.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// Directory holding snapshot.json, log.ndjson and questions.ndjson.
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Creates this admin account on startup if it does not exist yet.
    #[arg(long, requires = "admin_password")]
    admin: Option<String>,
    #[arg(long, env = "QUERYARENA_ADMIN_PASSWORD", hide_env_values = true)]
    admin_password: Option<String>,
    /// Loads questions from this ndjson file when the bank is empty.
    #[arg(long)]
    seed_questions: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let args = Args::parse();

    let registry = Registry::open(
        &args.data_dir,
        RegistryConfig::default(),
        Arc::new(SystemClock),
    )?;
    if let (Some(user), Some(password)) = (&args.admin, &args.admin_password) {
        if registry.account(user).is_none() {
            registry.create_admin(user, password, ProfileDetails::default())?;
            tracing::info!(user, "admin account created");
        }
    }
    if let Some(path) = &args.seed_questions {
        if registry.question_count() == 0 {
            let n = registry.seed_questions(read_questions(path)?)?;
            tracing::info!(n, path = %path.display(), "question bank seeded");
        }
    }

    let listener = tokio::net::TcpListener::bind(args.bind).await?;
    serve(listener, AppState::new(Arc::new(registry))).await?;
    Ok(())
}
