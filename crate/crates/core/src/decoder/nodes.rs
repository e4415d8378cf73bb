//! One-shot node decoders.
//!
//! Each decoder maps the `M` soft inputs of a node to an estimate of the
//! node's `M` code bits (its partial sums).

use super::arith::Arithmetic;

/// All-zero estimate.
pub fn rate0_into(out: &mut [u8]) {
    out.fill(0);
}

/// Element-wise hard decision.
pub fn rate1_into<A: Arithmetic>(arith: &A, alpha: &[A::Llr], out: &mut [u8]) {
    for (o, &a) in out.iter_mut().zip(alpha) {
        *o = arith.hard(a);
    }
}

/// Repetition: every bit takes the sign of the summed inputs.
pub fn rep_into<A: Arithmetic>(arith: &A, alpha: &[A::Llr], out: &mut [u8]) {
    out.fill(arith.hard(arith.sum(alpha)));
}

/// Wagner decoding of a single parity check code.
pub fn spc_into<A: Arithmetic>(arith: &A, alpha: &[A::Llr], out: &mut [u8]) {
    let mut parity = 0;
    for (o, &a) in out.iter_mut().zip(alpha) {
        *o = arith.hard(a);
        parity ^= *o;
    }
    if parity == 1 {
        out[arith.argmin_magnitude(alpha)] ^= 1;
    }
}

fn gather<L: Copy>(alpha: &[L], start: usize, stride: usize) -> Vec<L> {
    alpha.iter().skip(start).step_by(stride).copied().collect()
}

fn scatter(out: &mut [u8], start: usize, stride: usize, bits: &[u8]) {
    for (o, &b) in out.iter_mut().skip(start).step_by(stride).zip(bits) {
        *o = b;
    }
}

/// Dual SPC: two independent Wagner decoders on the even- and odd-indexed
/// code bits.
pub fn spc2_into<A: Arithmetic>(arith: &A, alpha: &[A::Llr], out: &mut [u8]) {
    let half = alpha.len() / 2;
    let mut bits = vec![0u8; half];
    for start in 0..2 {
        let sub = gather(alpha, start, 2);
        spc_into(arith, &sub, &mut bits);
        scatter(out, start, 2, &bits);
    }
}

/// Dual repetition: odd positions repeat `u[M-1]`, even positions repeat
/// `u[M-2] ^ u[M-1]`.
pub fn rep2_into<A: Arithmetic>(arith: &A, alpha: &[A::Llr], out: &mut [u8]) {
    for start in 0..2 {
        let bit = arith.hard(arith.sum(&gather(alpha, start, 2)));
        for o in out.iter_mut().skip(start).step_by(2) {
            *o = bit;
        }
    }
}

/// Repeated parity check.
///
/// The four residue groups (index mod 4) each carry a sign parity; in a
/// codeword all four agree, forming a virtual rate-1/4 repetition code. The
/// cheaper of "all even" and "all odd" is reached by flipping the
/// least reliable bit of every disagreeing group. Equal costs resolve to
/// even parity.
pub fn rpc_into<A: Arithmetic>(arith: &A, alpha: &[A::Llr], out: &mut [u8]) {
    rate1_into(arith, alpha, out);
    let mut parity = [0u8; 4];
    let mut pos = [0usize; 4];
    let mut to_even = 0.0;
    let mut to_odd = 0.0;
    for i in 0..4 {
        let group = gather(alpha, i, 4);
        parity[i] = group.iter().fold(0, |p, &a| p ^ arith.hard(a));
        let j = arith.argmin_magnitude(&group);
        pos[i] = 4 * j + i;
        let delta = arith.magnitude(group[j]);
        if parity[i] == 1 {
            to_even += delta;
        } else {
            to_odd += delta;
        }
    }
    let flip_parity = if to_even <= to_odd { 1 } else { 0 };
    for i in 0..4 {
        if parity[i] == flip_parity {
            out[pos[i]] ^= 1;
        }
    }
}

/// Parity-checked repetition.
///
/// Each residue group repeats one bit of a virtual rate-3/4 SPC code: the
/// group sums are Wagner-decoded and the decisions broadcast back.
pub fn pcr_into<A: Arithmetic>(arith: &A, alpha: &[A::Llr], out: &mut [u8]) {
    let sums: Vec<A::Llr> = (0..4).map(|i| arith.sum(&gather(alpha, i, 4))).collect();
    let mut virt = [0u8; 4];
    spc_into(arith, &sums, &mut virt);
    for (k, o) in out.iter_mut().enumerate() {
        *o = virt[k % 4];
    }
}

macro_rules! owning {
    ($(#[$m:meta])* $name:ident, $inner:ident) => {
        $(#[$m])*
        pub fn $name<A: Arithmetic>(arith: &A, alpha: &[A::Llr]) -> Vec<u8> {
            let mut out = vec![0u8; alpha.len()];
            $inner(arith, alpha, &mut out);
            out
        }
    };
}

owning!(
    /// Dual SPC decoding, allocating the output.
    decode_spc2, spc2_into
);
owning!(
    /// Dual REP decoding, allocating the output.
    decode_rep2, rep2_into
);
owning!(
    /// RPC decoding, allocating the output.
    decode_rpc, rpc_into
);
owning!(
    /// PCR decoding, allocating the output.
    decode_pcr, pcr_into
);
owning!(
    /// Wagner SPC decoding, allocating the output.
    decode_spc, spc_into
);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::arith::{Fixed, Float};

    #[test]
    fn spc_flips_least_reliable() {
        assert_eq!(decode_spc(&Float, &[1.0, -2.0, 3.0, 4.0]), vec![1, 1, 0, 0]);
        assert_eq!(decode_spc(&Fixed::new(5), &[1, -2, 3, 4]), vec![1, 1, 0, 0]);
    }

    #[test]
    fn rep_uses_sum_sign() {
        let mut out = [9u8; 4];
        rep_into(&Float, &[1.0, 1.0, -3.0, 0.0], &mut out);
        assert_eq!(out, [1; 4]);
        rate0_into(&mut out);
        assert_eq!(out, [0; 4]);
    }

    #[test]
    fn spc2_examples() {
        assert_eq!(decode_spc2(&Float, &[1.0, -2.0, 3.0, -4.0]), vec![0, 1, 0, 1]);
        assert_eq!(decode_spc2(&Float, &[1.0; 8]), vec![0; 8]);
        // Evens carry odd sign parity: flip the weakest even position (4).
        let out = decode_spc2(&Float, &[3.0, 1.0, -2.0, 1.0, 0.5, 1.0, 4.0, 1.0]);
        assert_eq!(out, vec![0, 0, 1, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn rep2_examples() {
        assert_eq!(decode_rep2(&Float, &[1.0, 2.0, -3.0, 4.0]), vec![1, 0, 1, 0]);
        assert_eq!(decode_rep2(&Float, &[-1.0; 8]), vec![1; 8]);
        assert_eq!(decode_rep2(&Float, &[2.0, -1.0, -2.0, -1.0]), vec![0, 1, 0, 1]);
    }

    #[test]
    fn rpc_examples() {
        let a = [1.0, -2.0, 3.0, 4.0, -5.0, 6.0, 7.0, 8.0];
        assert_eq!(decode_rpc(&Float, &a), vec![1, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(decode_rpc(&Float, &[1.0, 1.0, 1.0, -1.0]), vec![0, 0, 0, 0]);
        assert_eq!(decode_rpc(&Float, &[-2.0, -2.0, -2.0, -2.0]), vec![1, 1, 1, 1]);
    }

    #[test]
    fn pcr_examples() {
        assert_eq!(decode_pcr(&Float, &[1.0, -2.0, 3.0, -4.0]), vec![0, 1, 0, 1]);
        assert_eq!(decode_pcr(&Float, &[1.0; 8]), vec![0; 8]);
        assert_eq!(decode_pcr(&Float, &[1.0, 1.0, 1.0, -2.0]), vec![1, 0, 0, 1]);
    }
}
