use tracing_subscriber::EnvFilter;

#[tokio::main]
async fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    let config = match therminfo_server::ServerConfig::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("therminfo-server: {e}");
            std::process::exit(2);
        }
    };
    if let Err(e) = therminfo_server::serve(config).await {
        eprintln!("therminfo-server: {e}");
        std::process::exit(1);
    }
}
