//! Two-party channels carrying framed messages: an in-process loopback and a
//! TCP loopback that puts the same bytes on a real socket.

use std::collections::VecDeque;
use std::net::{Shutdown, TcpListener, TcpStream};
use std::sync::mpsc::{channel, Receiver};
use std::thread::JoinHandle;

use sha2::{Digest, Sha256};

use super::wire::{decode_msg, encode_msg, read_msg, WireMessage};
use crate::error::{Error, Result};

/// The two protocol parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    /// Key issuer and deletion verifier.
    Lessor,
    /// Key holder.
    Lessee,
}

impl Party {
    fn slot(self) -> usize {
        match self {
            Self::Lessor => 0,
            Self::Lessee => 1,
        }
    }

    /// The other party.
    pub fn peer(self) -> Self {
        match self {
            Self::Lessor => Self::Lessee,
            Self::Lessee => Self::Lessor,
        }
    }
}

/// A duplex channel between the lessor and the lessee.
pub trait Transport {
    /// Sends `msg` from `from` to its peer.
    fn send(&mut self, from: Party, msg: &WireMessage) -> Result<()>;
    /// Receives the next message addressed to `to`.
    fn recv(&mut self, to: Party) -> Result<WireMessage>;
    /// Wire statistics so far.
    fn stats(&self) -> &WireStats;
}

/// Byte count and running digest of everything sent.
#[derive(Clone, Debug, Default)]
pub struct WireStats {
    /// Frames sent.
    pub frames: usize,
    /// Bytes sent.
    pub bytes: usize,
    hasher: Sha256,
}

impl WireStats {
    fn record(&mut self, bytes: &[u8]) {
        self.frames += 1;
        self.bytes += bytes.len();
        self.hasher.update(bytes);
    }

    /// Hex SHA-256 of the concatenated frames.
    pub fn digest_hex(&self) -> String {
        self.hasher
            .clone()
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// In-process queues holding encoded frames.
#[derive(Debug, Default)]
pub struct Loopback {
    inbox: [VecDeque<Vec<u8>>; 2],
    stats: WireStats,
}

impl Loopback {
    /// Empty channel.
    pub fn new() -> Self {
        Self::default()
    }
}

impl Transport for Loopback {
    fn send(&mut self, from: Party, msg: &WireMessage) -> Result<()> {
        let bytes = encode_msg(msg);
        self.stats.record(&bytes);
        self.inbox[from.peer().slot()].push_back(bytes);
        Ok(())
    }

    fn recv(&mut self, to: Party) -> Result<WireMessage> {
        let bytes = self.inbox[to.slot()]
            .pop_front()
            .ok_or_else(|| Error::Protocol(format!("{to:?} has no pending message")))?;
        decode_msg(&bytes)
    }

    fn stats(&self) -> &WireStats {
        &self.stats
    }
}

/// A connected socket pair on 127.0.0.1 with one reader thread per direction.
#[derive(Debug)]
pub struct TcpLoopback {
    streams: [TcpStream; 2],
    inbox: [Receiver<Result<WireMessage>>; 2],
    readers: Vec<JoinHandle<()>>,
    stats: WireStats,
}

fn spawn_reader(mut stream: TcpStream) -> (Receiver<Result<WireMessage>>, JoinHandle<()>) {
    let (tx, rx) = channel();
    let handle = std::thread::spawn(move || loop {
        let msg = read_msg(&mut stream);
        let stop = msg.is_err();
        if tx.send(msg).is_err() || stop {
            break;
        }
    });
    (rx, handle)
}

impl TcpLoopback {
    /// Binds an ephemeral port and connects both ends.
    pub fn new() -> Result<Self> {
        let io = |e: std::io::Error| Error::Protocol(format!("tcp loopback: {e}"));
        let listener = TcpListener::bind("127.0.0.1:0").map_err(io)?;
        let lessor = TcpStream::connect(listener.local_addr().map_err(io)?).map_err(io)?;
        let (lessee, _) = listener.accept().map_err(io)?;
        let (rx_lessor, h0) = spawn_reader(lessor.try_clone().map_err(io)?);
        let (rx_lessee, h1) = spawn_reader(lessee.try_clone().map_err(io)?);
        Ok(Self {
            streams: [lessor, lessee],
            inbox: [rx_lessor, rx_lessee],
            readers: vec![h0, h1],
            stats: WireStats::default(),
        })
    }
}

impl Transport for TcpLoopback {
    fn send(&mut self, from: Party, msg: &WireMessage) -> Result<()> {
        let bytes = encode_msg(msg);
        self.stats.record(&bytes);
        std::io::Write::write_all(&mut self.streams[from.slot()], &bytes)
            .map_err(|e| Error::Protocol(format!("tcp send: {e}")))
    }

    fn recv(&mut self, to: Party) -> Result<WireMessage> {
        self.inbox[to.slot()]
            .recv()
            .map_err(|_| Error::Protocol("tcp reader stopped".into()))?
    }

    fn stats(&self) -> &WireStats {
        &self.stats
    }
}

impl Drop for TcpLoopback {
    fn drop(&mut self) {
        for s in &self.streams {
            let _ = s.shutdown(Shutdown::Both);
        }
        for h in self.readers.drain(..) {
            let _ = h.join();
        }
    }
}
