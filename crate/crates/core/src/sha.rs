//! Reference SHA-256 and the bitcoin header conventions the engine consumes.
//!
//! Header layout (80 bytes, bitcoin wire order): version u32 LE, previous block
//! hash 32 B, merkle root 32 B, time u32 LE, bits u32 LE, nonce u32 LE. The
//! first 64 bytes compress to a midstate off-chip; the engine hashes the second
//! block (header bytes 64..80 + padding) and then the 32-byte digest.

use num_bigint::BigUint;

pub const K: [u32; 64] = [
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
];

pub const IV: [u32; 8] = [
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a, 0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
];

pub type Digest = [u8; 32];

#[inline]
pub fn big_sigma0(x: u32) -> u32 {
    x.rotate_right(2) ^ x.rotate_right(13) ^ x.rotate_right(22)
}
#[inline]
pub fn big_sigma1(x: u32) -> u32 {
    x.rotate_right(6) ^ x.rotate_right(11) ^ x.rotate_right(25)
}
#[inline]
pub fn small_sigma0(x: u32) -> u32 {
    x.rotate_right(7) ^ x.rotate_right(18) ^ (x >> 3)
}
#[inline]
pub fn small_sigma1(x: u32) -> u32 {
    x.rotate_right(17) ^ x.rotate_right(19) ^ (x >> 10)
}
#[inline]
pub fn ch(e: u32, f: u32, g: u32) -> u32 {
    (e & f) | (g & !e)
}
#[inline]
pub fn maj(a: u32, b: u32, c: u32) -> u32 {
    (a & b) | (c & (a | b))
}

pub fn compress(state: &[u32; 8], block: &[u8]) -> [u32; 8] {
    let mut w = [0u32; 64];
    for (i, chunk) in block.chunks_exact(4).take(16).enumerate() {
        w[i] = u32::from_be_bytes(chunk.try_into().unwrap());
    }
    compress_words(state, &w[..16].try_into().unwrap())
}

pub fn compress_words(state: &[u32; 8], block: &[u32; 16]) -> [u32; 8] {
    let mut w = [0u32; 64];
    w[..16].copy_from_slice(block);
    for t in 16..64 {
        w[t] = small_sigma1(w[t - 2])
            .wrapping_add(w[t - 7])
            .wrapping_add(small_sigma0(w[t - 15]))
            .wrapping_add(w[t - 16]);
    }
    let [mut a, mut b, mut c, mut d, mut e, mut f, mut g, mut h] = *state;
    for t in 0..64 {
        let t1 = h
            .wrapping_add(big_sigma1(e))
            .wrapping_add(ch(e, f, g))
            .wrapping_add(K[t])
            .wrapping_add(w[t]);
        let t2 = big_sigma0(a).wrapping_add(maj(a, b, c));
        h = g;
        g = f;
        f = e;
        e = d.wrapping_add(t1);
        d = c;
        c = b;
        b = a;
        a = t1.wrapping_add(t2);
    }
    let mut out = *state;
    for (o, v) in out.iter_mut().zip([a, b, c, d, e, f, g, h]) {
        *o = o.wrapping_add(v);
    }
    out
}

pub fn sha256(message: &[u8]) -> Digest {
    let mut data = message.to_vec();
    let bit_len = (message.len() as u64).wrapping_mul(8);
    data.push(0x80);
    while data.len() % 64 != 56 {
        data.push(0);
    }
    data.extend_from_slice(&bit_len.to_be_bytes());
    let mut state = IV;
    for block in data.chunks_exact(64) {
        state = compress(&state, block);
    }
    words_to_digest(&state)
}

pub fn double_sha256(message: &[u8]) -> Digest {
    sha256(&sha256(message))
}

pub fn words_to_digest(words: &[u32; 8]) -> Digest {
    let mut out = [0u8; 32];
    for (i, w) in words.iter().enumerate() {
        out[4 * i..4 * i + 4].copy_from_slice(&w.to_be_bytes());
    }
    out
}

pub fn digest_to_words(d: &Digest) -> [u32; 8] {
    let mut w = [0u32; 8];
    for (i, chunk) in d.chunks_exact(4).enumerate() {
        w[i] = u32::from_be_bytes(chunk.try_into().unwrap());
    }
    w
}

/// An 80-byte block header; the nonce field is overwritten per candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header(pub [u8; 80]);

impl Header {
    pub fn from_hex(s: &str) -> Result<Self, String> {
        let bytes = hex::decode(s.trim()).map_err(|e| format!("header hex: {e}"))?;
        let arr: [u8; 80] = bytes
            .try_into()
            .map_err(|v: Vec<u8>| format!("header must be 80 bytes, got {}", v.len()))?;
        Ok(Header(arr))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn with_nonce(&self, nonce: u32) -> Header {
        let mut h = *self;
        h.0[76..80].copy_from_slice(&nonce.to_le_bytes());
        h
    }

    pub fn midstate(&self) -> [u32; 8] {
        compress(&IV, &self.0[..64])
    }

    /// Message words of the second SHA block for a given nonce.
    pub fn tail_block(&self, nonce: u32) -> [u32; 16] {
        let h = self.with_nonce(nonce);
        let mut w = [0u32; 16];
        for i in 0..4 {
            w[i] = u32::from_be_bytes(h.0[64 + 4 * i..68 + 4 * i].try_into().unwrap());
        }
        w[4] = 0x8000_0000;
        w[15] = 80 * 8;
        w
    }
}

/// Message block of the second hash: the 256-bit first digest plus padding.
pub fn digest_block(d1: &[u32; 8]) -> [u32; 16] {
    let mut w = [0u32; 16];
    w[..8].copy_from_slice(d1);
    w[8] = 0x8000_0000;
    w[15] = 256;
    w
}

/// The digest as bitcoin's 256-bit number (the bytes read little-endian).
pub fn digest_value(d: &Digest) -> BigUint {
    BigUint::from_bytes_le(d)
}

/// `digest < target`. A target of 2^256 accepts everything, 0 accepts nothing.
pub fn meets_target(d: &Digest, target: &BigUint) -> bool {
    digest_value(d) < *target
}
