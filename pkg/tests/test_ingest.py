import io

import pytest

from epclose import IngestError, Label, SchemaConfig, encode_dataset_pair, load_pair, mine_ccps
from epclose.ingest import Directive, read_baskets, read_dump, write_dump

from conftest import DATA, TABLE1_CCPS, decoded_keys


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


@pytest.mark.parametrize("text,expected", [
    ("continuous:5", Directive("continuous", bins=5)),
    ("categorical", Directive("categorical")),
    (" Flag ", Directive("flag")),
    ("label:dos, probe", Directive("label", attack_values=frozenset({"dos", "probe"}))),
    ("ignore", Directive("ignore")),
])
def test_directive_parse(text, expected):
    assert Directive.parse(text) == expected


@pytest.mark.parametrize("text", ["continuous:1", "continuous:x", "label:", "colour", "ignore:3"])
def test_directive_parse_rejects(text):
    with pytest.raises(ValueError):
        Directive.parse(text)


def test_schema_allows_one_label_column():
    with pytest.raises(ValueError):
        SchemaConfig({"a": Directive.parse("label:x"), "b": Directive.parse("label:y")})


def test_schema_file(tmp_path):
    path = write(tmp_path, "s.ini", "[options]\ndelimiter = tab\nheader = no\n"
                                    "[columns]\n0 = continuous:3\n2 = ignore\n")
    schema = SchemaConfig.from_file(path)
    assert schema.delimiter == "\t"
    assert schema.has_header is False
    assert schema.columns["0"] == Directive("continuous", bins=3)


def test_schema_file_errors(tmp_path):
    with pytest.raises(IngestError):
        SchemaConfig.from_file(write(tmp_path, "a.ini", "[columns]\nx = bogus\n"))
    with pytest.raises(IngestError):
        SchemaConfig.from_file(write(tmp_path, "b.ini", "no section header\n"))


def test_table1_flag_csv_matches_baskets():
    schema = SchemaConfig.from_file(DATA / "table1_schema.ini")
    csv_pair = encode_dataset_pair(DATA / "table1_background.csv",
                                   DATA / "table1_target.csv", schema)
    basket_pair = load_pair(DATA / "table1_background.txt", DATA / "table1_target.txt")
    assert [t.label for t in csv_pair.target] == [Label.ATTACK, Label.NORMAL, Label.ATTACK,
                                                  Label.NORMAL, Label.ATTACK]
    for pair in (csv_pair, basket_pair):
        assert decoded_keys(mine_ccps(pair, "0.4", "1.5"), pair) == TABLE1_CCPS


def test_continuous_bins_are_fitted_jointly(tmp_path):
    bg = write(tmp_path, "bg.csv", "dur,proto\n1,tcp\n2,tcp\n3,udp\n")
    tg = write(tmp_path, "tg.csv", "dur,proto\n4,udp\n5,icmp\n6,tcp\n")
    schema = SchemaConfig({"dur": Directive.parse("continuous:2")})
    pair = encode_dataset_pair(bg, tg, schema)
    rows = [pair.decode(t.items) for t in pair.transactions]
    # [DERIVED] joint median of 1..6 is 3: background is all bin 1, target all bin 2
    assert [sorted(r) for r in rows] == [
        ["dur=bin_1", "proto=tcp"], ["dur=bin_1", "proto=tcp"], ["dur=bin_1", "proto=udp"],
        ["dur=bin_2", "proto=udp"], ["dur=bin_2", "proto=icmp"], ["dur=bin_2", "proto=tcp"],
    ]


def test_missing_values_and_whitespace(tmp_path):
    bg = write(tmp_path, "bg.csv", "dur,svc\n1,web server\n?,ftp\n")
    tg = write(tmp_path, "tg.csv", "dur,svc\n2,\n3,ftp\n")
    pair = encode_dataset_pair(bg, tg, SchemaConfig({"dur": Directive.parse("continuous:2")}))
    symbols = set(pair.symbols)
    assert {"dur=NA", "svc=web_server", "svc=NA"} <= symbols


def test_row_numbered_errors(tmp_path):
    bg = write(tmp_path, "bg.csv", "dur,svc\n1,a\nx,b\n2,c\n")
    tg = write(tmp_path, "tg.csv", "dur,svc\n1,a\n")
    with pytest.raises(IngestError) as info:
        encode_dataset_pair(bg, tg, SchemaConfig({"dur": Directive.parse("continuous:2")}))
    assert info.value.rows == (3,)
    ragged = write(tmp_path, "r.csv", "a,b\n1,2\n3\n")
    with pytest.raises(IngestError, match="rows 3"):
        encode_dataset_pair(ragged, tg, SchemaConfig())


def test_schema_naming_unknown_column(tmp_path):
    bg = write(tmp_path, "bg.csv", "a\n1\n")
    with pytest.raises(IngestError, match="not in the file"):
        encode_dataset_pair(bg, bg, SchemaConfig({"zzz": Directive("ignore")}))


def test_headers_must_agree(tmp_path):
    bg = write(tmp_path, "bg.csv", "a\n1\n")
    tg = write(tmp_path, "tg.csv", "b\n1\n")
    with pytest.raises(IngestError, match="different headers"):
        encode_dataset_pair(bg, tg, SchemaConfig())


def test_baskets_skip_comments_and_read_labels():
    rows = read_baskets(DATA / "table1_target_labeled.txt")
    assert rows.items[0] == ["a", "b", "d"]
    assert rows.labels == [Label.ATTACK, Label.NORMAL, Label.ATTACK, Label.NORMAL, Label.ATTACK]


def test_bad_basket_label(tmp_path):
    with pytest.raises(IngestError, match="unknown label"):
        read_baskets(write(tmp_path, "t.txt", "a b,label=weird\n"))


def test_missing_file():
    with pytest.raises(IngestError, match="cannot read"):
        load_pair("/nonexistent/bg.txt", "/nonexistent/tg.txt")


def test_dump_round_trip(tmp_path, table1_labeled_pair):
    buf = io.StringIO()
    write_dump(table1_labeled_pair, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "B a b f"
    assert text.splitlines()[5] == "T a b d,label=attack"
    again = read_dump(write(tmp_path, "dump.txt", text))
    assert [again.decode(t.items) for t in again.transactions] == \
        [table1_labeled_pair.decode(t.items) for t in table1_labeled_pair.transactions]
    assert [t.label for t in again.target] == [t.label for t in table1_labeled_pair.target]
