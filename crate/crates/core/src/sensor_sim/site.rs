/// Trunks and stumps of the default site: Poisson-disk layout, at least 1.3 m
/// from the default track. `(center, radius, height)`.
pub(super) const DEFAULT_SITE_TREES: [([f64; 2], f64, f64); 85] = [
    ([2.46, -3.91], 0.13, 3.57),
    ([10.48, 5.99], 0.42, 0.51),
    ([4.56, 9.01], 0.30, 0.44),
    ([-4.54, 2.94], 0.16, 3.03),
    ([-6.73, -1.19], 0.14, 3.18),
    ([7.07, 13.00], 0.13, 4.91),
    ([12.90, 9.11], 0.16, 3.95),
    ([8.27, 1.32], 0.19, 4.87),
    ([7.97, 6.27], 0.19, 3.13),
    ([-1.75, 4.93], 0.15, 3.51),
    ([15.14, 11.01], 0.19, 3.73),
    ([6.01, 18.45], 0.14, 3.28),
    ([-7.01, -5.27], 0.21, 4.56),
    ([17.04, 13.48], 0.38, 0.43),
    ([3.32, 10.91], 0.11, 4.62),
    ([5.23, -5.43], 0.22, 4.97),
    ([2.45, 16.37], 0.16, 3.11),
    ([6.37, 3.72], 0.15, 3.27),
    ([-6.99, 2.39], 0.14, 4.68),
    ([13.99, 16.38], 0.24, 4.53),
    ([8.05, 17.34], 0.25, 4.18),
    ([-0.83, 8.67], 0.21, 4.55),
    ([0.92, 10.62], 0.38, 0.47),
    ([-3.54, -4.27], 0.18, 4.31),
    ([-0.95, 13.80], 0.17, 4.64),
    ([5.27, -0.75], 0.42, 0.51),
    ([4.40, 2.29], 0.22, 3.19),
    ([-0.84, -5.53], 0.28, 0.54),
    ([9.16, 14.33], 0.24, 3.79),
    ([13.86, 2.99], 0.16, 4.27),
    ([-2.88, 8.01], 0.18, 3.51),
    ([15.75, 7.87], 0.41, 0.45),
    ([14.25, 5.22], 0.12, 3.52),
    ([-0.45, -3.55], 0.16, 4.75),
    ([0.16, 3.66], 0.17, 3.13),
    ([11.56, 3.88], 0.23, 3.66),
    ([3.02, 13.13], 0.18, 3.47),
    ([-3.59, 11.16], 0.12, 4.58),
    ([0.91, 14.64], 0.32, 0.31),
    ([16.14, 16.45], 0.12, 3.56),
    ([13.02, 11.86], 0.26, 0.58),
    ([-2.33, -2.07], 0.14, 3.97),
    ([11.86, 16.16], 0.41, 0.34),
    ([10.63, 0.82], 0.18, 3.21),
    ([10.36, 12.00], 0.11, 3.10),
    ([13.08, 14.38], 0.22, 3.77),
    ([5.78, 15.00], 0.18, 4.64),
    ([-4.41, -1.37], 0.13, 3.35),
    ([6.88, -3.54], 0.23, 3.40),
    ([-6.76, -3.27], 0.32, 0.52),
    ([-2.73, -0.03], 0.12, 3.14),
    ([1.25, 6.74], 0.18, 3.20),
    ([11.68, 19.22], 0.21, 3.07),
    ([5.65, 11.02], 0.13, 3.98),
    ([9.56, 8.18], 0.14, 4.27),
    ([2.64, -1.42], 0.10, 3.79),
    ([7.77, -1.24], 0.16, 4.64),
    ([4.59, -3.25], 0.17, 4.46),
    ([5.75, 5.98], 0.23, 4.96),
    ([-3.91, 5.37], 0.13, 4.29),
    ([-1.06, 2.04], 0.24, 3.49),
    ([3.09, 7.59], 0.37, 0.46),
    ([-5.98, 4.35], 0.39, 0.54),
    ([17.16, 10.16], 0.22, 3.29),
    ([10.28, 17.69], 0.15, 4.53),
    ([-6.20, 7.50], 0.29, 0.54),
    ([-5.84, 0.64], 0.21, 3.99),
    ([17.56, 6.40], 0.24, 4.17),
    ([8.54, 3.42], 0.23, 4.59),
    ([-4.52, 9.16], 0.29, 0.50),
    ([0.35, -1.30], 0.22, 4.93),
    ([-4.89, -5.80], 0.13, 4.81),
    ([2.69, 0.61], 0.23, 3.86),
    ([-1.16, 10.82], 0.36, 0.33),
    ([-7.93, 0.50], 0.15, 4.27),
    ([4.18, 4.47], 0.10, 4.09),
    ([13.22, 7.09], 0.16, 4.36),
    ([14.77, 12.98], 0.12, 3.42),
    ([8.46, 19.33], 0.18, 4.67),
    ([13.62, 18.48], 0.13, 4.85),
    ([16.46, 4.72], 0.16, 4.58),
    ([4.55, 16.99], 0.41, 0.35),
    ([1.29, -5.69], 0.12, 3.36),
    ([10.89, 9.88], 0.16, 3.92),
    ([8.04, 11.23], 0.18, 4.39),
];
