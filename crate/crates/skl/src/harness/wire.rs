//! Framed messages: a type tag, a version byte, a 32-bit item count and
//! length-prefixed per-index blobs. Keys and certificates on disk use the
//! same frames.

use std::io::{Read, Write};

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

/// The only frame version produced and accepted.
pub const WIRE_VERSION: u8 = 1;

/// Frame header length: tag, version and count.
pub const HEADER_BYTES: usize = 6;

/// Frame type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MsgTag {
    /// `{y_i, sfe.msg1_i}`.
    KeygenMsg1,
    /// `{sfe.msg2_i}`.
    KeygenMsg2,
    /// `{d_i, c_i}`.
    Cert,
    /// Per-index watermarkable ciphertexts, or a PRF input.
    Ciphertext,
    /// Non-interactive ciphertext: fresh keys, sender messages and ciphertexts.
    NiBundle,
    /// Encryption-key file.
    EncryptionKey,
    /// Leased-key file.
    QuantumKey,
    /// Lessor secret file.
    LessorSecret,
}

impl MsgTag {
    /// Wire byte.
    pub fn byte(self) -> u8 {
        match self {
            Self::KeygenMsg1 => 0x01,
            Self::KeygenMsg2 => 0x02,
            Self::Cert => 0x03,
            Self::Ciphertext => 0x04,
            Self::NiBundle => 0x05,
            Self::EncryptionKey => 0x06,
            Self::QuantumKey => 0x07,
            Self::LessorSecret => 0x08,
        }
    }

    /// Inverse of [`Self::byte`].
    pub fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            0x01 => Self::KeygenMsg1,
            0x02 => Self::KeygenMsg2,
            0x03 => Self::Cert,
            0x04 => Self::Ciphertext,
            0x05 => Self::NiBundle,
            0x06 => Self::EncryptionKey,
            0x07 => Self::QuantumKey,
            0x08 => Self::LessorSecret,
            _ => return Err(Error::Decode(format!("unknown message tag {b:#04x}"))),
        })
    }

    /// Every tag, in byte order.
    pub const ALL: [MsgTag; 8] = [
        Self::KeygenMsg1,
        Self::KeygenMsg2,
        Self::Cert,
        Self::Ciphertext,
        Self::NiBundle,
        Self::EncryptionKey,
        Self::QuantumKey,
        Self::LessorSecret,
    ];
}

/// One frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireMessage {
    /// Frame type.
    pub tag: MsgTag,
    /// Per-index blobs.
    pub items: Vec<Vec<u8>>,
}

impl WireMessage {
    /// Frame of the given type.
    pub fn new(tag: MsgTag, items: Vec<Vec<u8>>) -> Self {
        Self { tag, items }
    }

    /// Fails unless the frame has the expected type.
    pub fn expect(self, tag: MsgTag) -> Result<Self> {
        if self.tag == tag {
            Ok(self)
        } else {
            Err(Error::Protocol(format!(
                "expected {tag:?}, received {:?}",
                self.tag
            )))
        }
    }
}

/// Serializes a frame.
pub fn encode_msg(msg: &WireMessage) -> Vec<u8> {
    let mut w = Writer::new();
    w.u8(msg.tag.byte());
    w.u8(WIRE_VERSION);
    w.len(msg.items.len());
    for item in &msg.items {
        w.blob(item);
    }
    w.into_bytes()
}

/// Parses a frame; trailing bytes are an error.
pub fn decode_msg(bytes: &[u8]) -> Result<WireMessage> {
    let mut r = Reader::new(bytes);
    let tag = MsgTag::from_byte(r.u8()?)?;
    let version = r.u8()?;
    if version != WIRE_VERSION {
        return Err(Error::Decode(format!(
            "unsupported frame version {version}"
        )));
    }
    let count = r.len(4)?;
    let items = (0..count)
        .map(|_| r.blob().map(<[u8]>::to_vec))
        .collect::<Result<_>>()?;
    r.finish()?;
    Ok(WireMessage { tag, items })
}

fn io_err(e: std::io::Error) -> Error {
    Error::Protocol(format!("transport: {e}"))
}

/// Writes one frame to a byte stream.
pub fn write_msg<W: Write>(out: &mut W, msg: &WireMessage) -> Result<()> {
    out.write_all(&encode_msg(msg)).map_err(io_err)?;
    out.flush().map_err(io_err)
}

/// Reads exactly one frame from a byte stream.
pub fn read_msg<R: Read>(input: &mut R) -> Result<WireMessage> {
    let mut header = [0u8; HEADER_BYTES];
    input.read_exact(&mut header).map_err(io_err)?;
    let count = u32::from_le_bytes(header[2..6].try_into().expect("4 bytes"));
    let mut frame = header.to_vec();
    for _ in 0..count {
        let mut len = [0u8; 4];
        input.read_exact(&mut len).map_err(io_err)?;
        let n = u32::from_le_bytes(len) as usize;
        frame.extend_from_slice(&len);
        let start = frame.len();
        frame.resize(start + n, 0);
        input.read_exact(&mut frame[start..]).map_err(io_err)?;
    }
    decode_msg(&frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_frame_is_header_only() {
        let bytes = encode_msg(&WireMessage::new(MsgTag::Cert, vec![]));
        assert_eq!(bytes, vec![0x03, WIRE_VERSION, 0, 0, 0, 0]);
        assert_eq!(decode_msg(&bytes).unwrap().items.len(), 0);
    }

    #[test]
    fn rejects_bad_tag_version_and_trailing_bytes() {
        let mut bytes = encode_msg(&WireMessage::new(MsgTag::KeygenMsg1, vec![vec![1, 2, 3]]));
        assert!(decode_msg(&bytes).is_ok());
        bytes.push(0);
        assert!(decode_msg(&bytes).is_err());
        bytes.pop();
        bytes[1] = 2;
        assert!(decode_msg(&bytes).is_err());
        bytes[1] = WIRE_VERSION;
        bytes[0] = 0x7f;
        assert!(decode_msg(&bytes).is_err());
    }

    #[test]
    fn stream_reader_matches_decoder() {
        let msg = WireMessage::new(MsgTag::NiBundle, vec![vec![], vec![9; 300], vec![1]]);
        let bytes = encode_msg(&msg);
        let mut cursor = std::io::Cursor::new(bytes.clone());
        assert_eq!(read_msg(&mut cursor).unwrap(), msg);
        for tag in MsgTag::ALL {
            assert_eq!(MsgTag::from_byte(tag.byte()).unwrap(), tag);
        }
    }
}
