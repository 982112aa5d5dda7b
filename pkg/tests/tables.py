RETURN_COUNTS = [1, 1, 2, 5, 13, 35, 97, 275, 794, 2327, 6905, 20705]
TOTAL_COUNTS = [1, 2, 5, 14, 40, 117, 348, 1049, 3196, 9823, 30413]
LEVEL_COUNTS = {
    1: [0, 1, 2, 5, 13, 36, 102, 295, 866, 2574, 7730, 23419],
    2: [0, 0, 1, 3, 9, 26, 77, 230, 694, 2110, 6459, 19890, 61577],
    3: [0, 0, 0, 1, 4, 14, 45, 143, 451, 1421, 4478, 14129, 44654],
    4: [0, 0, 0, 0, 1, 5, 20, 71, 242, 806, 2653, 8670, 28213],
}
