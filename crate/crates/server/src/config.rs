//! Service configuration from environment variables.

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;

use thiserror::Error;

use therminfo_core::EngineConfig;

pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{var}: {message}")]
    Invalid { var: &'static str, message: String },
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub bind: IpAddr,
    pub port: u16,
    /// Directory holding `store.jsonl`; the store is in memory when unset.
    pub data_dir: Option<PathBuf>,
    /// Shared secret for the admin routes; they always answer 401 when unset.
    pub admin_token: Option<String>,
    /// Built web UI, served under `/ui`.
    pub ui_dir: Option<PathBuf>,
    /// Load the bundled datasets into an empty store.
    pub seed: bool,
    pub gas_table: Option<PathBuf>,
    pub liquid_table: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            bind: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: DEFAULT_PORT,
            data_dir: None,
            admin_token: None,
            ui_dir: None,
            seed: true,
            gas_table: None,
            liquid_table: None,
        }
    }
}

fn flag(var: &'static str, value: &str) -> Result<bool, ConfigError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(ConfigError::Invalid {
            var,
            message: format!("expected a boolean, got '{other}'"),
        }),
    }
}

impl ServerConfig {
    /// Read `THERMINFO_*` variables through `get`, falling back to defaults.
    ///
    /// | variable | meaning |
    /// |---|---|
    /// | `THERMINFO_BIND` | listen address, default 127.0.0.1 |
    /// | `THERMINFO_PORT` | listen port, default 8080 |
    /// | `THERMINFO_DATA_DIR` | store directory |
    /// | `THERMINFO_ADMIN_TOKEN` | admin shared secret |
    /// | `THERMINFO_UI_DIR` | web UI bundle |
    /// | `THERMINFO_SEED` | seed an empty store, default true |
    /// | `THERMINFO_GAS_TABLE`, `THERMINFO_LIQUID_TABLE` | parameter table files |
    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut c = ServerConfig::default();
        let nonempty = |var: &str| get(var).filter(|v| !v.trim().is_empty());
        if let Some(v) = nonempty("THERMINFO_BIND") {
            c.bind = v.trim().parse().map_err(|e| ConfigError::Invalid {
                var: "THERMINFO_BIND",
                message: format!("{e}"),
            })?;
        }
        if let Some(v) = nonempty("THERMINFO_PORT") {
            c.port = v.trim().parse().map_err(|e| ConfigError::Invalid {
                var: "THERMINFO_PORT",
                message: format!("{e}"),
            })?;
        }
        c.data_dir = nonempty("THERMINFO_DATA_DIR").map(PathBuf::from);
        c.admin_token = nonempty("THERMINFO_ADMIN_TOKEN");
        c.ui_dir = nonempty("THERMINFO_UI_DIR").map(PathBuf::from);
        if let Some(v) = nonempty("THERMINFO_SEED") {
            c.seed = flag("THERMINFO_SEED", &v)?;
        }
        c.gas_table = nonempty("THERMINFO_GAS_TABLE").map(PathBuf::from);
        c.liquid_table = nonempty("THERMINFO_LIQUID_TABLE").map(PathBuf::from);
        Ok(c)
    }

    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn addr(&self) -> SocketAddr {
        SocketAddr::new(self.bind, self.port)
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            store_path: self.data_dir.as_ref().map(|d| d.join("store.jsonl")),
            seed_fixtures: self.seed,
            gas_table: self.gas_table.clone(),
            liquid_table: self.liquid_table.clone(),
        }
    }
}
