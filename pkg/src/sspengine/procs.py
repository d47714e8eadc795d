"""Procedure ids shared by the signature and attestation packages.

Procedures are identified by number; names exist only for display.
"""

KEY_GEN = 1
GET_PK = 2
SIGN = 3
VER_SIG = 4

# imports of the signature-protocol wrapper, renamed onto SIGN / VER_SIG
CHALLENGE = 5
VERIFY = 6

PROT = 7
# import of the attestation protocol, renamed onto PROT
SIG_PROT = 8

GET_PK_A = 9
ATTEST = 10
VERIFY_A = 11

NAMES = {
    KEY_GEN: "key_gen",
    GET_PK: "get_pk",
    SIGN: "sign",
    VER_SIG: "ver_sig",
    CHALLENGE: "challenge",
    VERIFY: "verify",
    PROT: "prot",
    SIG_PROT: "sig_prot",
    GET_PK_A: "get_pk_a",
    ATTEST: "attest",
    VERIFY_A: "verify_a",
}
