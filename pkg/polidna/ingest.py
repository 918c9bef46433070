"""Parse, validate, clean and serialize roll-call datasets."""

from __future__ import annotations

import json
import logging
from datetime import date
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd

from .constants import BILLS_FILE, DATASET_JSON_FILE, MIN_GROUP_SIZE, VOTERS_FILE, VOTES_FILE
from .models import Bill, CleaningReport, GroupAssignment, Voter, VoteDataset, VoteValue
from .utils import (
    DuplicateVote,
    EmptyAfterCleaning,
    InvalidParameter,
    IoError,
    MalformedRecord,
    UnknownGroup,
    UnknownVoteString,
    save_text_safely,
)

logger = logging.getLogger(__name__)

VOTES_COLUMNS = ("voter_id", "bill_id", "vote")
VOTERS_COLUMNS = ("voter_id", "group")
BILLS_COLUMNS = ("bill_id", "date", "description", "secret")


def _read_table(path: Path, columns: tuple[str, ...]) -> list[tuple[int, dict[str, str]]]:
    """Read a CSV as strings; returns (line number, record) pairs."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError:
        raise IoError(f"ingest: file not found: {path}") from None
    except pd.errors.EmptyDataError:
        raise MalformedRecord("file is empty (a header row is required)", source=str(path)) from None
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise MalformedRecord(f"cannot parse CSV: {e}", source=str(path)) from e

    frame.columns = [str(c).strip() for c in frame.columns]
    for column in columns:
        if column not in frame.columns:
            raise MalformedRecord("missing column", source=str(path), line=1, field=column)
    if frame.empty:
        raise MalformedRecord("no records after the header", source=str(path))

    # header is line 1
    return [
        (index + 2, {c: str(row[c]).strip() for c in columns})
        for index, row in enumerate(frame.to_dict("records"))
    ]


def _parse_date(raw: str, source: str, line: int | None) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise MalformedRecord(
            f"'{raw}' is not an ISO-8601 date", source=source, line=line, field="date"
        ) from None


def _parse_secret(raw: Any, source: str, line: int | None) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip()
    if text in ("0", "1"):
        return text == "1"
    raise MalformedRecord(f"secret must be 0 or 1, got '{raw}'", source=source, line=line, field="secret")


def _require(value: str, source: str, line: int | None, field: str) -> str:
    if not value:
        raise MalformedRecord("empty value", source=source, line=line, field=field)
    return value


def build_dataset(
    voter_rows: list[tuple[int | None, dict[str, Any]]],
    bill_rows: list[tuple[int | None, dict[str, Any]]],
    vote_rows: list[tuple[int | None, dict[str, Any]]],
    groups: list[str] | None = None,
    sources: tuple[str, str, str] = ("voters", "bills", "votes"),
) -> VoteDataset:
    """Validate raw records and assemble a VoteDataset.

    ``groups`` fixes the group order; when omitted it follows first appearance in the
    voter records.
    """
    voters_source, bills_source, votes_source = sources

    voters: list[Voter] = []
    seen_voters: set[str] = set()
    for line, row in voter_rows:
        voter_id = _require(str(row.get("voter_id", "")).strip(), voters_source, line, "voter_id")
        group = _require(str(row.get("group", "")).strip(), voters_source, line, "group")
        if voter_id in seen_voters:
            raise MalformedRecord(
                f"duplicate voter_id '{voter_id}'", source=voters_source, line=line, field="voter_id"
            )
        seen_voters.add(voter_id)
        voters.append(Voter(voter_id=voter_id, group=group))

    if groups is None:
        ordered_groups = list(dict.fromkeys(v.group for v in voters))
    else:
        ordered_groups = [str(g) for g in groups]
        if len(set(ordered_groups)) != len(ordered_groups):
            raise MalformedRecord("group ids must be distinct", source=voters_source, field="groups")
        known = set(ordered_groups)
        for voter in voters:
            if voter.group not in known:
                raise UnknownGroup(
                    f"ingest: voter '{voter.voter_id}' has unknown group '{voter.group}'"
                )
    if len(ordered_groups) < 2:
        raise MalformedRecord("at least two groups are required", source=voters_source, field="group")

    bills: list[Bill] = []
    seen_bills: set[str] = set()
    for line, row in bill_rows:
        bill_id = _require(str(row.get("bill_id", "")).strip(), bills_source, line, "bill_id")
        if bill_id in seen_bills:
            raise MalformedRecord(
                f"duplicate bill_id '{bill_id}'", source=bills_source, line=line, field="bill_id"
            )
        seen_bills.add(bill_id)
        bills.append(
            Bill(
                bill_id=bill_id,
                date=_parse_date(str(row.get("date", "")).strip(), bills_source, line),
                description=str(row.get("description", "") or ""),
                secret_ballot=_parse_secret(row.get("secret", ""), bills_source, line),
            )
        )

    votes: dict[tuple[str, str], VoteValue] = {}
    for line, row in vote_rows:
        voter_id = str(row.get("voter_id", "")).strip()
        bill_id = str(row.get("bill_id", "")).strip()
        if voter_id not in seen_voters:
            raise MalformedRecord(
                f"unknown voter '{voter_id}'", source=votes_source, line=line, field="voter_id"
            )
        if bill_id not in seen_bills:
            raise MalformedRecord(
                f"unknown bill '{bill_id}'", source=votes_source, line=line, field="bill_id"
            )
        try:
            value = VoteValue.parse(row.get("vote", ""))
        except UnknownVoteString:
            raise UnknownVoteString(
                f"unknown vote string '{row.get('vote', '')}'",
                source=votes_source,
                line=line,
                field="vote",
            ) from None
        key = (voter_id, bill_id)
        if key in votes:
            raise DuplicateVote(
                f"duplicate vote for ({voter_id}, {bill_id})", source=votes_source, line=line
            )
        votes[key] = value

    return VoteDataset(
        voters=tuple(voters), bills=tuple(bills), votes=votes, groups=tuple(ordered_groups)
    )


def parse_csv_files(votes: str | Path, voters: str | Path, bills: str | Path) -> VoteDataset:
    """Parse the three-file CSV form."""
    votes, voters, bills = Path(votes), Path(voters), Path(bills)
    return build_dataset(
        _read_table(voters, VOTERS_COLUMNS),
        _read_table(bills, BILLS_COLUMNS),
        _read_table(votes, VOTES_COLUMNS),
        sources=(str(voters), str(bills), str(votes)),
    )


def parse_json_file(path: str | Path) -> VoteDataset:
    """Parse a JSON dataset: one object with arrays ``voters``, ``bills``, ``votes``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise IoError(f"ingest: file not found: {path}") from None
    if not text.strip():
        raise MalformedRecord("file is empty", source=str(path))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedRecord(f"invalid JSON: {e.msg}", source=str(path), line=e.lineno) from e
    if not isinstance(data, dict):
        raise MalformedRecord("top level must be an object", source=str(path))

    arrays = {}
    for name in ("voters", "bills", "votes"):
        records = data.get(name)
        if not isinstance(records, list) or not records:
            raise MalformedRecord("missing or empty array", source=str(path), field=name)
        for index, record in enumerate(records):
            if not isinstance(record, dict):
                raise MalformedRecord(
                    f"{name}[{index}] must be an object", source=str(path), field=name
                )
        # records are numbered from 1 within their array
        arrays[name] = [(index + 1, record) for index, record in enumerate(records)]

    groups = data.get("groups")
    if groups is not None and not isinstance(groups, list):
        raise MalformedRecord("'groups' must be an array", source=str(path), field="groups")

    return build_dataset(
        arrays["voters"],
        arrays["bills"],
        arrays["votes"],
        groups=groups,
        sources=(f"{path}:voters", f"{path}:bills", f"{path}:votes"),
    )


def parse_dataset(path: str | Path, format: Literal["csv", "json"] = "csv") -> VoteDataset:
    """Parse a dataset: a JSON file, or a directory holding votes/voters/bills CSVs."""
    path = Path(path)
    if format == "json":
        return parse_json_file(path)
    if format == "csv":
        return parse_csv_files(path / VOTES_FILE, path / VOTERS_FILE, path / BILLS_FILE)
    raise InvalidParameter(f"ingest: unknown format '{format}' (expected csv or json)")


def _zero_variance_bills(dataset: VoteDataset) -> set[str]:
    constant = set()
    for bill in dataset.bills:
        values = {dataset.vote(v.voter_id, bill.bill_id) for v in dataset.voters}
        if len(values) < 2:
            constant.add(bill.bill_id)
    return constant


def _never_voting(dataset: VoteDataset) -> set[str]:
    return {
        v.voter_id
        for v in dataset.voters
        if all(dataset.vote(v.voter_id, b.bill_id) is VoteValue.NOT_VOTING for b in dataset.bills)
    }


def _restrict(dataset: VoteDataset, voters: list[Voter], bills: list[Bill]) -> VoteDataset:
    voter_ids = {v.voter_id for v in voters}
    bill_ids = {b.bill_id for b in bills}
    votes = {
        key: value
        for key, value in dataset.votes.items()
        if key[0] in voter_ids and key[1] in bill_ids
    }
    return VoteDataset(voters=tuple(voters), bills=tuple(bills), votes=votes, groups=dataset.groups)


def clean_dataset_report(dataset: VoteDataset) -> CleaningReport:
    """Drop secret ballots, then never-voting voters and zero-variance bills to a fixed point."""
    bills = [b for b in dataset.bills if not b.secret_ballot]
    secret = dataset.n_bills - len(bills)
    current = _restrict(dataset, list(dataset.voters), bills)

    never_voting = 0
    zero_variance = 0
    passes = 0
    while True:
        passes += 1
        silent = _never_voting(current)
        voters = [v for v in current.voters if v.voter_id not in silent]
        current = _restrict(current, voters, list(current.bills))
        constant = _zero_variance_bills(current) if voters else set()
        bills = [b for b in current.bills if b.bill_id not in constant]
        current = _restrict(current, voters, bills)
        never_voting += len(silent)
        zero_variance += len(constant)
        if not silent and not constant:
            break
        if not current.voters or not current.bills:
            break

    if not current.voters or not current.bills:
        raise EmptyAfterCleaning(
            f"ingest: nothing left after cleaning ({current.n_voters} voters, "
            f"{current.n_bills} bills)"
        )

    present = {v.group for v in current.voters}
    groups = tuple(g for g in current.groups if g in present)
    if len(groups) < 2:
        raise EmptyAfterCleaning(f"ingest: only {len(groups)} group(s) left after cleaning")
    cleaned = VoteDataset(
        voters=current.voters, bills=current.bills, votes=current.votes, groups=groups
    )

    report = CleaningReport(
        dataset=cleaned,
        secret_bills=secret,
        never_voting_voters=never_voting,
        zero_variance_bills=zero_variance,
        empty_groups=len(dataset.groups) - len(groups),
        passes=passes,
    )
    logger.debug("cleaning: %s", report.to_dict())
    return report


def clean_dataset(dataset: VoteDataset) -> VoteDataset:
    """Apply the cleaning rules; see ``clean_dataset_report`` for the counts."""
    return clean_dataset_report(dataset).dataset


def merge_small_groups(
    dataset: VoteDataset, into: str, minimum: int = MIN_GROUP_SIZE
) -> VoteDataset:
    """Relabel every voter of a group smaller than ``minimum`` into ``into``."""
    sizes = dataset.group_sizes()
    small = {g for g, size in sizes.items() if size < minimum and g != into}
    if not small:
        return dataset
    logger.info("merging small group(s) %s into '%s'", ", ".join(sorted(small)), into)
    voters = tuple(
        Voter(v.voter_id, into) if v.group in small else v for v in dataset.voters
    )
    groups = [g for g in dataset.groups if g not in small]
    if into not in groups:
        groups.append(into)
    return VoteDataset(voters=voters, bills=dataset.bills, votes=dataset.votes, groups=tuple(groups))


def group_assignment(dataset: VoteDataset) -> GroupAssignment:
    """Group index of every voter, in dataset group order."""
    index = {g: i for i, g in enumerate(dataset.groups)}
    return GroupAssignment(
        indices=np.array([index[v.group] for v in dataset.voters], dtype=int),
        groups=dataset.groups,
    )


def _records(dataset: VoteDataset) -> dict[str, list[dict[str, Any]]]:
    return {
        "voters": [{"voter_id": v.voter_id, "group": v.group} for v in dataset.voters],
        "bills": [
            {
                "bill_id": b.bill_id,
                "date": b.date.isoformat(),
                "description": b.description,
                "secret": int(b.secret_ballot),
            }
            for b in dataset.bills
        ],
        "votes": [
            {"voter_id": voter_id, "bill_id": bill_id, "vote": value.label}
            for (voter_id, bill_id), value in dataset.votes.items()
        ],
    }


def write_dataset(
    dataset: VoteDataset, target: str | Path, format: Literal["csv", "json"] = "csv"
) -> list[Path]:
    """Serialize a dataset; csv writes three files into the ``target`` directory."""
    target = Path(target)
    records = _records(dataset)
    if format == "json":
        if target.suffix != ".json":
            target.mkdir(parents=True, exist_ok=True)
            target = target / DATASET_JSON_FILE
        else:
            target.parent.mkdir(parents=True, exist_ok=True)
        payload = {"groups": list(dataset.groups), **records}
        save_text_safely(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", target)
        return [target]
    if format != "csv":
        raise InvalidParameter(f"ingest: unknown format '{format}' (expected csv or json)")

    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name, columns, rows in (
        (VOTERS_FILE, VOTERS_COLUMNS, records["voters"]),
        (BILLS_FILE, BILLS_COLUMNS, records["bills"]),
        (VOTES_FILE, VOTES_COLUMNS, records["votes"]),
    ):
        path = target / name
        frame = pd.DataFrame(rows, columns=list(columns))
        save_text_safely(frame.to_csv(index=False, lineterminator="\n"), path)
        written.append(path)
    return written
