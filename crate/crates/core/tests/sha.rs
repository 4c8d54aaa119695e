use proptest::prelude::*;
use rqlsha::sha::{compress, digest_value, double_sha256, meets_target, sha256, Header, IV};
use sha2::{Digest as _, Sha256};

fn oracle(m: &[u8]) -> [u8; 32] {
    Sha256::digest(m).into()
}

#[test]
fn standard_vectors() {
    let cases: [(&[u8], &str); 3] = [
        (b"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"),
        (b"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"),
        (
            b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
            "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1",
        ),
    ];
    for (m, want) in cases {
        assert_eq!(hex::encode(sha256(m)), want);
    }
    let million = vec![b'a'; 1_000_000];
    assert_eq!(
        hex::encode(sha256(&million)),
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0"
    );
}

#[test]
fn genesis_block_hash() {
    let h = Header::from_hex("0100000000000000000000000000000000000000000000000000000000000000000000003ba3edfd7a7b12b27ac72c3e67768f617fc81bc3888a51323a9fb8aa4b1e5e4a29ab5f49ffff001d1dac2b7c").unwrap();
    let mut d = double_sha256(&h.0);
    d.reverse();
    assert_eq!(hex::encode(d), "000000000019d6689c085ae165831e934ff763ae46a2a6c172b3f1b60a8ce26f");
}

#[test]
fn target_edges() {
    use num_bigint::BigUint;
    let d = double_sha256(b"x");
    assert!(meets_target(&d, &(BigUint::from(1u8) << 256)));
    assert!(!meets_target(&d, &BigUint::from(0u8)));
    assert!(!meets_target(&d, &digest_value(&d)));
    assert!(meets_target(&d, &(digest_value(&d) + 1u8)));
    assert!(Header::from_hex("00").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sha256_matches_oracle(m in prop::collection::vec(any::<u8>(), 0..300)) {
        prop_assert_eq!(sha256(&m), oracle(&m));
        prop_assert_eq!(double_sha256(&m), oracle(&oracle(&m)));
    }

    #[test]
    fn midstate_plus_tail_is_the_header_hash(bytes in prop::collection::vec(any::<u8>(), 80), nonce in any::<u32>()) {
        let h = Header(bytes.try_into().unwrap());
        prop_assert_eq!(h.midstate(), compress(&IV, &h.0[..64]));
        let full = h.with_nonce(nonce);
        prop_assert_eq!(&full.0[76..], &nonce.to_le_bytes()[..]);
        let tail = h.tail_block(nonce);
        let words = rqlsha::sha::compress_words(&h.midstate(), &tail);
        prop_assert_eq!(rqlsha::sha::words_to_digest(&words), oracle(&full.0));
    }
}
