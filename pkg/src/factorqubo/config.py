"""Flat ``key = value`` config files (no sections, ``#`` comments)."""
from __future__ import annotations

import configparser
from typing import Dict, Mapping

_SECTION = "config"


def parse_config(text: str) -> Dict[str, str]:
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        parser.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ValueError(f"bad config: {exc}") from None
    return {k: v.strip() for k, v in parser.items(_SECTION)}


def format_config(cfg: Mapping[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.items())


def read_config(path) -> Dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
