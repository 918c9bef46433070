"""Shared fixtures: small synthetic bloc datasets on disk."""

from pathlib import Path

import pytest

from polidna.ingest import write_dataset
from polidna.models import DnaConfig
from polidna.synth import SyntheticBlocs, gen_blocs


def write_csv(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def blocs() -> SyntheticBlocs:
    """Three groups of eight voters, thirty bills, one planted cross-voter."""
    return gen_blocs(3, [8, 8, 8], 30, 0.9, 1, seed=11)


@pytest.fixture
def dataset_dir(tmp_path, blocs) -> Path:
    target = tmp_path / "data"
    write_dataset(blocs.dataset, target, "csv")
    return target


@pytest.fixture
def dataset_config(dataset_dir) -> DnaConfig:
    return DnaConfig(
        votes=str(dataset_dir / "votes.csv"),
        voters=str(dataset_dir / "voters.csv"),
        bills=str(dataset_dir / "bills.csv"),
    )


@pytest.fixture
def tiny_csv(tmp_path) -> dict[str, Path]:
    """Four voters in two groups, three bills (one secret)."""
    voters = write_csv(tmp_path / "voters.csv", "voter_id,group\nv1,A\nv2,A\nv3,B\nv4,B\n")
    bills = write_csv(
        tmp_path / "bills.csv",
        "bill_id,date,description,secret\n"
        "b1,2013-03-15,Budget,0\n"
        "b2,2013-04-02,Reform,0\n"
        "b3,2013-05-10,Nomination,1\n",
    )
    votes = write_csv(
        tmp_path / "votes.csv",
        "voter_id,bill_id,vote\n"
        "v1,b1,Favorevole\n"
        "v2,b1,Yes\n"
        "v3,b1,Contrario\n"
        "v4,b1,No\n"
        "v1,b2,No\n"
        "v2,b2,Assente\n"
        "v3,b2,Yes\n"
        "v1,b3,Yes\n"
        "v3,b3,No\n",
    )
    return {"votes": votes, "voters": voters, "bills": bills}
