use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread::{self, JoinHandle};

use super::{parse_line, Bus, Envelope, Service};

/// Default TCP port of the NDJSON transport.
pub const DEFAULT_PORT: u16 = 7070;

/// Publishes a client line: the command if it is valid, else a `lab/error`.
/// Blank lines are ignored.
pub fn ingest(bus: &Bus, line: &str) {
    let line = line.trim();
    if line.is_empty() {
        return;
    }
    match parse_line(line) {
        Ok(cmd) => bus.publish(&cmd.to_envelope()),
        Err(reason) => {
            log::debug!("rejected client line: {reason}");
            bus.publish(&Envelope::error(reason));
        }
    }
}

/// Relays NDJSON between `input`/`output` and the service's bus until
/// `input` ends and the service is idle. Every envelope on the bus is
/// written to `output`, one per line. Lines are handled one at a time, so
/// the output order is deterministic for a manual clock. Under a manual
/// clock, robots still moving when `input` ends are run to a stop.
pub fn serve_stdio<R, W>(service: &Service, input: R, output: W) -> io::Result<()>
where
    R: BufRead,
    W: Write + Send + 'static,
{
    let bus = service.bus();
    let mut output = output;
    let sub = bus.subscribe("#", move |env| {
        let _ = writeln!(output, "{}", env.to_line()).and_then(|_| output.flush());
    });
    let result = input.lines().try_for_each(|line| {
        line.map(|l| {
            service.submit_line(&l);
            service.settle();
        })
    });
    service.drain();
    bus.unsubscribe(sub);
    result
}

/// NDJSON over TCP: each connection sends commands and receives every
/// envelope published on the bus.
pub struct TcpServer {
    listener: TcpListener,
    bus: Bus,
    stop: Arc<AtomicBool>,
}

impl TcpServer {
    pub fn bind(addr: impl ToSocketAddrs, bus: &Bus) -> io::Result<Self> {
        Ok(TcpServer {
            listener: TcpListener::bind(addr)?,
            bus: bus.clone(),
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections until stopped.
    pub fn run(&self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            match stream {
                Ok(stream) => {
                    let bus = self.bus.clone();
                    thread::spawn(move || {
                        if let Err(e) = handle_connection(stream, &bus) {
                            log::debug!("connection closed: {e}");
                        }
                    });
                }
                Err(e) => log::warn!("accept failed: {e}"),
            }
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> io::Result<TcpHandle> {
        let addr = self.local_addr()?;
        let stop = Arc::clone(&self.stop);
        let thread = thread::spawn(move || {
            let _ = self.run();
        });
        Ok(TcpHandle {
            addr,
            stop,
            thread: Some(thread),
        })
    }
}

pub struct TcpHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl TcpHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting; open connections end when their clients disconnect.
    pub fn shutdown(mut self) {
        self.stop_accepting();
    }

    fn stop_accepting(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // wake the blocking accept
        let _ = TcpStream::connect(self.addr);
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for TcpHandle {
    fn drop(&mut self) {
        self.stop_accepting();
    }
}

fn handle_connection(stream: TcpStream, bus: &Bus) -> io::Result<()> {
    let mut writer = stream.try_clone()?;
    let (tx, rx) = mpsc::channel::<String>();
    let sub = bus.subscribe("#", move |env| {
        let _ = tx.send(env.to_line());
    });
    let pump = thread::spawn(move || {
        for line in rx {
            if writeln!(writer, "{line}").is_err() {
                break;
            }
        }
    });
    let result = BufReader::new(stream)
        .lines()
        .try_for_each(|line| line.map(|l| ingest(bus, &l)));
    bus.unsubscribe(sub);
    let _ = pump.join();
    result
}
