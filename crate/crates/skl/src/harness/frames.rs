//! Conversions between protocol objects and [`WireMessage`] frames.

use super::wire::{MsgTag, WireMessage};
use crate::bits::BitVec;
use crate::branch::BranchState;
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};
use crate::lease::{
    DeletionCert, KeygenMsg1, KeygenMsg2, NiCiphertext, PkeSklCt, QuantumKey, SklConfig,
};
use crate::modq::{LatticeParams, Scalar};
use crate::pke::Pke;
use crate::sfe::SfeMsg2;
use crate::wpke::{WpkeCt, WpkeEk};

fn one_item<T>(bytes: &[u8], f: impl FnOnce(&mut Reader<'_>) -> Result<T>) -> Result<T> {
    let mut r = Reader::new(bytes);
    let out = f(&mut r)?;
    r.finish()?;
    Ok(out)
}

fn item(f: impl FnOnce(&mut Writer)) -> Vec<u8> {
    let mut w = Writer::new();
    f(&mut w);
    w.into_bytes()
}

/// Round-1 frame.
pub fn msg1_frame<S: Scalar>(p: &LatticeParams<S>, msg1: &KeygenMsg1<S>) -> WireMessage {
    WireMessage::new(MsgTag::KeygenMsg1, msg1.to_items(p))
}

/// Parses a round-1 frame.
pub fn msg1_from_frame<S: Scalar>(p: &LatticeParams<S>, msg: WireMessage) -> Result<KeygenMsg1<S>> {
    KeygenMsg1::from_items(p, &msg.expect(MsgTag::KeygenMsg1)?.items)
}

/// Round-2 frame.
pub fn msg2_frame<S: Scalar>(p: &LatticeParams<S>, msg2: &KeygenMsg2<S>) -> WireMessage {
    WireMessage::new(MsgTag::KeygenMsg2, msg2.to_items(p))
}

/// Parses a round-2 frame.
pub fn msg2_from_frame<S: Scalar>(p: &LatticeParams<S>, msg: WireMessage) -> Result<KeygenMsg2<S>> {
    KeygenMsg2::from_items(p, &msg.expect(MsgTag::KeygenMsg2)?.items)
}

/// Certificate frame.
pub fn cert_frame(cert: &DeletionCert) -> WireMessage {
    WireMessage::new(MsgTag::Cert, cert.to_items())
}

/// Parses a certificate frame.
pub fn cert_from_frame(msg: WireMessage) -> Result<DeletionCert> {
    DeletionCert::from_items(&msg.expect(MsgTag::Cert)?.items)
}

/// Ciphertext frame, one item per index.
pub fn ct_frame<P: Pke>(pke: &P, ct: &PkeSklCt<P>) -> WireMessage {
    let items = ct.cts.iter().map(|c| item(|w| c.encode(pke, w))).collect();
    WireMessage::new(MsgTag::Ciphertext, items)
}

/// Parses a ciphertext frame.
pub fn ct_from_frame<P: Pke>(pke: &P, msg: WireMessage) -> Result<PkeSklCt<P>> {
    let cts = msg
        .expect(MsgTag::Ciphertext)?
        .items
        .iter()
        .map(|b| one_item(b, |r| WpkeCt::decode(pke, r)))
        .collect::<Result<_>>()?;
    Ok(PkeSklCt { cts })
}

/// A PRF input travels as a one-item ciphertext frame.
pub fn input_frame(s: &BitVec) -> WireMessage {
    WireMessage::new(MsgTag::Ciphertext, vec![item(|w| w.bits(s))])
}

/// Parses a PRF input frame.
pub fn input_from_frame(msg: WireMessage) -> Result<BitVec> {
    let msg = msg.expect(MsgTag::Ciphertext)?;
    ensure_len(1, msg.items.len())?;
    one_item(&msg.items[0], |r| r.bits())
}

/// Non-interactive ciphertext frame: per index the fresh key, the sender message and the ciphertext.
pub fn ni_frame<S: Scalar, P: Pke>(
    p: &LatticeParams<S>,
    pke: &P,
    ct: &NiCiphertext<S, P>,
) -> WireMessage {
    let items = ct
        .weks
        .iter()
        .zip(&ct.msg2.msg2s)
        .zip(&ct.ct.cts)
        .map(|((ek, m2), c)| {
            item(|w| {
                w.blob(&item(|w| ek.encode(pke, w)));
                w.blob(&item(|w| m2.encode(p, w)));
                w.blob(&item(|w| c.encode(pke, w)));
            })
        })
        .collect();
    WireMessage::new(MsgTag::NiBundle, items)
}

/// Parses a non-interactive ciphertext frame.
pub fn ni_from_frame<S: Scalar, P: Pke>(
    p: &LatticeParams<S>,
    pke: &P,
    msg: WireMessage,
) -> Result<NiCiphertext<S, P>> {
    let mut weks = Vec::new();
    let mut msg2s = Vec::new();
    let mut cts = Vec::new();
    for bytes in &msg.expect(MsgTag::NiBundle)?.items {
        one_item(bytes, |r| {
            weks.push(one_item(r.blob()?, |r| WpkeEk::decode(pke, r))?);
            msg2s.push(one_item(r.blob()?, |r| SfeMsg2::decode(p, r))?);
            cts.push(one_item(r.blob()?, |r| WpkeCt::decode(pke, r))?);
            Ok(())
        })?;
    }
    Ok(NiCiphertext {
        weks,
        msg2: KeygenMsg2 { msg2s },
        ct: PkeSklCt { cts },
    })
}

/// First item of every key file: which preset and dimensions the rest assumes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileHeader {
    /// Preset name.
    pub params: String,
    /// Protocol dimensions.
    pub config: SklConfig,
}

impl FileHeader {
    fn to_item(&self) -> Vec<u8> {
        item(|w| {
            w.str(&self.params);
            w.len(self.config.n);
            w.len(self.config.w);
            w.len(self.config.label_bytes);
        })
    }

    fn from_item(bytes: &[u8]) -> Result<Self> {
        one_item(bytes, |r| {
            let params = r.str()?;
            let n = r.u32()? as usize;
            let w = r.u32()? as usize;
            let label = r.u32()? as usize;
            let config = SklConfig::new(n, w)
                .and_then(|c| c.with_label_bytes(label))
                .map_err(|e| Error::Decode(e.to_string()))?;
            Ok(Self { params, config })
        })
    }

    /// Reads the header of any key file without parsing the rest.
    pub fn peek(msg: &WireMessage) -> Result<Self> {
        Self::from_item(
            msg.items
                .first()
                .ok_or_else(|| Error::Decode("empty key file".into()))?,
        )
    }
}

fn split_header(msg: &WireMessage, tag: MsgTag) -> Result<(FileHeader, &[Vec<u8>])> {
    if msg.tag != tag {
        return Err(Error::Decode(format!(
            "expected {tag:?}, found {:?}",
            msg.tag
        )));
    }
    let header = FileHeader::peek(msg)?;
    let rest = &msg.items[1..];
    ensure_len(header.config.indices(), rest.len())?;
    Ok((header, rest))
}

/// Encryption-key file: header, then one watermarkable key per index.
pub fn ek_file<P: Pke>(header: &FileHeader, pke: &P, weks: &[WpkeEk<P>]) -> WireMessage {
    let mut items = vec![header.to_item()];
    items.extend(weks.iter().map(|ek| item(|w| ek.encode(pke, w))));
    WireMessage::new(MsgTag::EncryptionKey, items)
}

/// Parses an encryption-key file.
pub fn ek_from_file<P: Pke>(pke: &P, msg: &WireMessage) -> Result<(FileHeader, Vec<WpkeEk<P>>)> {
    let (header, rest) = split_header(msg, MsgTag::EncryptionKey)?;
    let weks = rest
        .iter()
        .map(|b| one_item(b, |r| WpkeEk::decode(pke, r)))
        .collect::<Result<_>>()?;
    Ok((header, weks))
}

/// Leased-key file: header, then per index the branch state and the round-2 message.
pub fn qkey_file<S: Scalar>(
    header: &FileHeader,
    p: &LatticeParams<S>,
    key: &QuantumKey<S>,
) -> WireMessage {
    let mut items = vec![header.to_item()];
    items.extend(key.states.iter().zip(&key.msg2s).map(|(s, m)| {
        item(|w| {
            s.encode(w);
            m.encode(p, w);
        })
    }));
    WireMessage::new(MsgTag::QuantumKey, items)
}

/// Parses a leased-key file.
pub fn qkey_from_file<S: Scalar>(
    p: &LatticeParams<S>,
    msg: &WireMessage,
) -> Result<(FileHeader, QuantumKey<S>)> {
    let (header, rest) = split_header(msg, MsgTag::QuantumKey)?;
    let (states, msg2s) = rest
        .iter()
        .map(|b| one_item(b, |r| Ok((BranchState::decode(r)?, SfeMsg2::decode(p, r)?))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok((header, QuantumKey { states, msg2s }))
}

/// Lessor secret file: header, the lessor's seed, then the round-1 transcript items.
pub fn lessor_file<S: Scalar>(
    header: &FileHeader,
    seed: u64,
    p: &LatticeParams<S>,
    msg1: &KeygenMsg1<S>,
) -> WireMessage {
    let mut items = vec![header.to_item(), item(|w| w.u64(seed))];
    items.extend(msg1.to_items(p));
    WireMessage::new(MsgTag::LessorSecret, items)
}

/// Parses a lessor secret file.
pub fn lessor_from_file<S: Scalar>(
    p: &LatticeParams<S>,
    msg: &WireMessage,
) -> Result<(FileHeader, u64, KeygenMsg1<S>)> {
    if msg.tag != MsgTag::LessorSecret {
        return Err(Error::Decode(format!(
            "expected LessorSecret, found {:?}",
            msg.tag
        )));
    }
    let header = FileHeader::peek(msg)?;
    if msg.items.len() != header.config.indices() + 2 {
        return Err(Error::Decode("lessor file has the wrong item count".into()));
    }
    let seed = one_item(&msg.items[1], |r| r.u64())?;
    let msg1 = KeygenMsg1::from_items(p, &msg.items[2..])?;
    Ok((header, seed, msg1))
}
