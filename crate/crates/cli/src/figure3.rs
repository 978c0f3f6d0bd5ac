//! Plotted coordinates of the two curves in the LP-bound comparison figure,
//! kept as the printed strings.

pub const PROVENANCE: &str =
    "static data: plotted coordinates of the linear programming bound and the best known sphere packing density, dimensions 1-32; not recomputed";

/// `(dimension, lp_bound, packing_density)`.
pub const TABLE: [(u32, &str, &str); 32] = [
    (1, "1.000000000000000", "1.000000000000000"),
    (2, "0.9068996821171089", "0.9068996821171089"),
    (3, "0.779746762", "0.7404804896930610"),
    (4, "0.647704966", "0.6168502750680849"),
    (5, "0.524980022", "0.4652576133092586"),
    (6, "0.417673416", "0.3729475455820649"),
    (7, "0.327455611", "0.2952978731457126"),
    (8, "0.253669508", "0.2536695079010480"),
    (9, "0.194555339", "0.1457748758081711"),
    (10, "0.147953479", "0.09961578280770881"),
    (11, "0.111690766", "0.06623802700980118"),
    (12, "0.083775831", "0.04945417662424406"),
    (13, "0.06248170014568450", "0.03201429216034980"),
    (14, "0.04636448923374530", "0.02162409608244711"),
    (15, "0.03424826203368300", "0.01685757065676270"),
    (16, "0.02519413072133100", "0.01470816439743083"),
    (17, "0.01846409033506490", "0.008811319182321190"),
    (18, "0.01348534044508620", "0.006167898125331257"),
    (19, "0.009817955139543800", "0.004120806279768668"),
    (20, "0.007127053603376300", "0.003394581410712645"),
    (21, "0.005159660394817600", "0.002465884711502463"),
    (22, "0.003725941968920600", "0.002451034044121183"),
    (23, "0.002684279886429100", "0.001905328193426062"),
    (24, "0.001929574309403923", "0.001929574309403923"),
    (25, "0.001384190722285700", "0.0006772120097731805"),
    (26, "0.0009910238892216000", "0.0002692200504338089"),
    (27, "0.0007082297958617000", "0.0001575943907278669"),
    (28, "0.0005052542161057000", "0.0001046381049248457"),
    (29, "0.0003598581852089000", "0.00003414464690742249"),
    (30, "0.0002559028743732000", "0.00002191535344783022"),
    (31, "0.0001817083813917000", "0.00001183776518593385"),
    (32, "0.0001288432887595000", "0.00001104074930885985"),
];
