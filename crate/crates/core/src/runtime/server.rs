//! TCP environment server: one thread per connection, shared session
//! state behind a mutex, deadlines enforced by the accept loop.

use std::collections::HashMap;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::Scenario;
use crate::runtime::message::ErrorCode;
use crate::runtime::session::{ConnectionId, Delivery, SessionOutcome, SessionState, Timeouts};

const POLL_INTERVAL: Duration = Duration::from_millis(2);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ServerConfig {
    /// Session name; the scenario name when unset.
    pub session: Option<String>,
    pub timeouts: Timeouts,
}

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("cannot bind {endpoint}: {source}")]
    Bind { endpoint: String, source: io::Error },
    #[error("network error: {0}")]
    Io(#[from] io::Error),
    #[error("session aborted ({code}): {message}")]
    Aborted { code: ErrorCode, message: String },
}

struct Shared {
    state: SessionState,
    writers: HashMap<ConnectionId, TcpStream>,
}

impl Shared {
    fn deliver(&mut self, deliveries: Vec<Delivery>) {
        for d in deliveries {
            match d {
                Delivery::Send(conn, msg) => {
                    if let Some(w) = self.writers.get_mut(&conn) {
                        if let Err(e) = w.write_all(msg.encode().as_bytes()) {
                            log::debug!("write to connection {conn} failed: {e}");
                        }
                    }
                }
                Delivery::Close(conn) => {
                    if let Some(w) = self.writers.remove(&conn) {
                        let _ = w.shutdown(Shutdown::Both);
                    }
                }
            }
        }
    }
}

fn lock(shared: &Mutex<Shared>) -> MutexGuard<'_, Shared> {
    // a panicking handler must not wedge the session
    shared.lock().unwrap_or_else(|e| e.into_inner())
}

pub struct Server {
    listener: TcpListener,
    scenario: Scenario,
    config: ServerConfig,
}

impl Server {
    /// Binds `endpoint`; port 0 picks a free port (see [`Server::local_addr`]).
    pub fn bind(
        scenario: Scenario,
        endpoint: impl ToSocketAddrs + std::fmt::Debug,
        config: ServerConfig,
    ) -> Result<Server, ServerError> {
        let listener = TcpListener::bind(&endpoint).map_err(|source| ServerError::Bind {
            endpoint: format!("{endpoint:?}"),
            source,
        })?;
        Ok(Server {
            listener,
            scenario,
            config,
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Serves one session to completion or abort.
    pub fn run(self) -> Result<SessionOutcome, ServerError> {
        let session = self
            .config
            .session
            .clone()
            .unwrap_or_else(|| self.scenario.name().to_string());
        log::info!(
            "serving session {session} ({} agents) on {}",
            self.scenario.agent_count(),
            self.listener.local_addr()?
        );
        let state = SessionState::new(self.scenario, session, self.config.timeouts, Instant::now());
        let shared = Arc::new(Mutex::new(Shared {
            state,
            writers: HashMap::new(),
        }));
        self.listener.set_nonblocking(true)?;

        let mut handlers: Vec<JoinHandle<()>> = Vec::new();
        let mut next_id: ConnectionId = 0;
        loop {
            match self.listener.accept() {
                Ok((stream, peer)) => {
                    next_id += 1;
                    log::debug!("connection {next_id} from {peer}");
                    stream.set_nonblocking(false)?;
                    let _ = stream.set_nodelay(true);
                    lock(&shared).writers.insert(next_id, stream.try_clone()?);
                    let shared = Arc::clone(&shared);
                    let id = next_id;
                    handlers.push(thread::spawn(move || handle(id, stream, &shared)));
                }
                Err(e) if e.kind() == io::ErrorKind::WouldBlock => {}
                Err(e) => return Err(e.into()),
            }
            {
                let mut guard = lock(&shared);
                let out = guard.state.on_tick(Instant::now());
                guard.deliver(out);
                if guard.state.is_finished() {
                    let open: Vec<ConnectionId> = guard.writers.keys().copied().collect();
                    guard.deliver(open.into_iter().map(Delivery::Close).collect());
                    break;
                }
            }
            thread::sleep(POLL_INTERVAL);
        }
        for h in handlers {
            let _ = h.join();
        }
        let guard = lock(&shared);
        if let Some((code, message)) = guard.state.aborted() {
            return Err(ServerError::Aborted {
                code,
                message: message.to_string(),
            });
        }
        Ok(guard
            .state
            .outcome()
            .cloned()
            .expect("finished sessions have an outcome"))
    }
}

fn handle(id: ConnectionId, stream: TcpStream, shared: &Mutex<Shared>) {
    let mut reader = BufReader::new(stream);
    let mut buf = Vec::new();
    loop {
        buf.clear();
        match reader.read_until(b'\n', &mut buf) {
            Ok(0) | Err(_) => break,
            Ok(_) => {
                let line = String::from_utf8_lossy(&buf);
                if line.trim().is_empty() {
                    continue;
                }
                let mut guard = lock(shared);
                let out = guard.state.on_line(id, &line, Instant::now());
                guard.deliver(out);
            }
        }
    }
    let mut guard = lock(shared);
    let out = guard.state.on_disconnect(id);
    guard.deliver(out);
    guard.writers.remove(&id);
}

/// Binds `endpoint` and serves one session.
pub fn serve_environment(
    scenario: Scenario,
    endpoint: impl ToSocketAddrs + std::fmt::Debug,
    config: ServerConfig,
) -> Result<SessionOutcome, ServerError> {
    Server::bind(scenario, endpoint, config)?.run()
}
