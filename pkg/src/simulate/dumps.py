"""Trajectory files: long-format CSV with a comment header, and a compact binary layout."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import ValidationError
from ..utils import ensure_directory
from .trajectory import Trajectory

MAGIC = b"NMRTTRJ1"
# seed, replication, burn_in, n, T, graph hash, model hash
_HEADER = struct.Struct("<QQQII64s64s")


def _hash_bytes(value: str) -> bytes:
    return value.encode("ascii")[:64].ljust(64, b"\0")


def write_trajectory_csv(traj: Trajectory, path: Path) -> Path:
    """Columns t,i,y,w,z; the final time T carries only y."""
    path = Path(path)
    ensure_directory(path.parent)
    n, horizon = traj.n, traj.T

    t = np.repeat(np.arange(horizon + 1), n)
    i = np.tile(np.arange(n), horizon + 1)
    frame = pd.DataFrame({
        "t": t,
        "i": i,
        "y": traj.Y.reshape(-1).astype(np.int64),
        "w": pd.array(np.concatenate([traj.W.reshape(-1), np.zeros(n)]), dtype="Int64"),
        "z": pd.array(np.concatenate([traj.Z.reshape(-1), np.zeros(n)]), dtype="Int64"),
    })
    frame.loc[frame["t"] == horizon, ["w", "z"]] = pd.NA

    header = {
        "seed": traj.seed,
        "replication": traj.replication,
        "burn_in": traj.burn_in,
        "T": horizon,
        "n": n,
        "policy": ";".join(repr(float(p)) for p in traj.policy),
        "graph_hash": traj.graph_hash,
        "model_hash": traj.model_hash,
    }
    with path.open("w", encoding="utf-8", newline="") as f:
        for key, value in header.items():
            f.write(f"# {key}={value}\n")
        frame.to_csv(f, index=False)
    return path


def read_trajectory_csv(path: Path) -> Trajectory:
    path = Path(path)
    meta = {}
    with path.open("r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
    try:
        n, horizon = int(meta["n"]), int(meta["T"])
        policy = np.array([float(p) for p in meta["policy"].split(";")]) if meta.get("policy") else np.empty(0)
    except (KeyError, ValueError) as e:
        raise ValidationError(f"Malformed trajectory header in {path}", str(e)) from e

    frame = pd.read_csv(path, comment="#", dtype={"t": "int64", "i": "int64", "y": "int64",
                                                  "w": "Int64", "z": "Int64"})
    Y = np.zeros((horizon + 1, n), dtype=np.uint8)
    Y[frame["t"].to_numpy(), frame["i"].to_numpy()] = frame["y"].to_numpy()
    body = frame[frame["t"] < horizon]
    W = np.zeros((horizon, n), dtype=np.uint8)
    Z = np.zeros((horizon, n), dtype=np.int64)
    rows, cols = body["t"].to_numpy(), body["i"].to_numpy()
    W[rows, cols] = body["w"].to_numpy(dtype=np.int64)
    Z[rows, cols] = body["z"].to_numpy(dtype=np.int64)
    return Trajectory(
        Y=Y, W=W, Z=Z, policy=policy,
        seed=int(meta.get("seed", 0)),
        replication=int(meta.get("replication", 0)),
        burn_in=int(meta.get("burn_in", 0)),
        graph_hash=meta.get("graph_hash", ""),
        model_hash=meta.get("model_hash", ""),
    )


def write_trajectory_binary(traj: Trajectory, path: Path) -> Path:
    """Little-endian layout: magic, fixed header, policy, Y, W, Z."""
    path = Path(path)
    ensure_directory(path.parent)
    with path.open("wb") as f:
        f.write(MAGIC)
        f.write(_HEADER.pack(traj.seed & ((1 << 64) - 1), traj.replication, traj.burn_in, traj.n, traj.T,
                             _hash_bytes(traj.graph_hash), _hash_bytes(traj.model_hash)))
        f.write(np.asarray(traj.policy, dtype="<f8").tobytes())
        f.write(np.asarray(traj.Y, dtype=np.uint8).tobytes())
        f.write(np.asarray(traj.W, dtype=np.uint8).tobytes())
        f.write(np.asarray(traj.Z, dtype="<u4").tobytes())
    return path


def read_trajectory_binary(path: Path) -> Trajectory:
    path = Path(path)
    data = path.read_bytes()
    if not data.startswith(MAGIC):
        raise ValidationError(f"{path} is not a trajectory dump", "bad magic bytes")
    offset = len(MAGIC)
    try:
        seed, replication, burn_in, n, horizon, ghash, mhash = _HEADER.unpack_from(data, offset)
    except struct.error as e:
        raise ValidationError(f"Truncated trajectory header in {path}", str(e)) from e
    offset += _HEADER.size

    sizes = [("policy", "<f8", (n,)), ("Y", np.uint8, (horizon + 1, n)),
             ("W", np.uint8, (horizon, n)), ("Z", "<u4", (horizon, n))]
    arrays = {}
    for name, dtype, shape in sizes:
        count = int(np.prod(shape))
        nbytes = count * np.dtype(dtype).itemsize
        if offset + nbytes > len(data):
            raise ValidationError(f"Truncated trajectory dump {path}", f"section {name} is incomplete")
        arrays[name] = np.frombuffer(data, dtype=dtype, count=count, offset=offset).reshape(shape).copy()
        offset += nbytes

    return Trajectory(
        Y=arrays["Y"], W=arrays["W"], Z=arrays["Z"].astype(np.int64),
        policy=arrays["policy"].astype(np.float64),
        seed=seed, replication=replication, burn_in=burn_in,
        graph_hash=ghash.rstrip(b"\0").decode("ascii"),
        model_hash=mhash.rstrip(b"\0").decode("ascii"),
    )
