//! Mean estimates and MSEs published for the simulation study, one row per
//! censoring plan, columns in estimator order MLE, BS, BL, EBS1, EBL1, EBS2,
//! EBL2, EBS3, EBL3.

pub struct PublishedRow {
    pub n: usize,
    pub scheme: &'static str,
    pub mean: [f64; 9],
    pub mse: [f64; 9],
}

pub const ALPHA: [PublishedRow; 12] = [
    PublishedRow {
        n: 20,
        scheme: "4,4,2,0*7",
        mean: [1.0624295, 1.0487666, 0.995123, 1.0038886, 0.9525508, 1.0245632, 0.9709781, 0.9832139, 0.9341235],
        mse: [0.15116386, 0.1251134, 0.09421697, 0.1091356, 0.08496838, 0.12162578, 0.0925168, 0.09799324, 0.07842493],
    },
    PublishedRow {
        n: 20,
        scheme: "2,2,1,0*12",
        mean: [1.0148799, 1.0093206, 0.9758401, 0.9797886, 0.9473193, 0.9924985, 0.959151, 0.9670787, 0.9354876],
        mse: [0.08031438, 0.07251388, 0.06084244, 0.0661458, 0.05698668, 0.07058401, 0.05995915, 0.06213595, 0.05437732],
    },
    PublishedRow {
        n: 20,
        scheme: "0*20",
        mean: [1.0044823, 1.0011412, 0.9763639, 0.9789076, 0.9547037, 0.9882626, 0.9635819, 0.9695526, 0.9458255],
        mse: [0.05515184, 0.05139057, 0.04492122, 0.04766107, 0.04251779, 0.05006708, 0.0442221, 0.04546904, 0.04100403],
    },
    PublishedRow {
        n: 30,
        scheme: "5*3,0*12",
        mean: [1.0270646, 1.0210275, 0.9868171, 0.9911423, 0.9579655, 1.0041343, 0.9700525, 0.9781502, 0.9458786],
        mse: [0.082403, 0.074293, 0.061692, 0.067184, 0.05719, 0.07198, 0.060454, 0.062833, 0.054303],
    },
    PublishedRow {
        n: 30,
        scheme: "4,4,2,0*17",
        mean: [1.00766, 1.004154, 0.979177, 0.98185, 0.957451, 0.991283, 0.966399, 0.972416, 0.948503],
        mse: [0.058621, 0.054432, 0.047402, 0.050437, 0.044767, 0.053068, 0.046655, 0.048028, 0.043075],
    },
    PublishedRow {
        n: 30,
        scheme: "0*30",
        mean: [0.991515, 0.989798, 0.973555, 0.974975, 0.958987, 0.98108, 0.964888, 0.968869, 0.953086],
        mse: [0.036393, 0.034832, 0.031809, 0.033027, 0.030557, 0.034135, 0.031395, 0.032004, 0.029798],
    },
    PublishedRow {
        n: 40,
        scheme: "5*4,0*16",
        mean: [1.000748, 0.997456, 0.972805, 0.975306, 0.951226, 0.984614, 0.960058, 0.965998, 0.942393],
        mse: [0.057018, 0.053123, 0.046625, 0.049467, 0.044291, 0.051887, 0.046006, 0.04726, 0.042766],
    },
    PublishedRow {
        n: 40,
        scheme: "4,4,2,0*27",
        mean: [0.991642, 0.989936, 0.973699, 0.97511, 0.959129, 0.981213, 0.965028, 0.969008, 0.953231],
        mse: [0.035647, 0.034113, 0.031131, 0.032326, 0.029896, 0.033419, 0.03072, 0.031319, 0.029151],
    },
    PublishedRow {
        n: 40,
        scheme: "0*40",
        mean: [0.981632, 0.980603, 0.968632, 0.969529, 0.9577, 0.97402, 0.96208, 0.965039, 0.953321],
        mse: [0.025645, 0.02486, 0.023252, 0.023886, 0.022572, 0.024469, 0.023021, 0.023347, 0.022166],
    },
    PublishedRow {
        n: 50,
        scheme: "5*5,0*20",
        mean: [0.996649, 0.994343, 0.974713, 0.976554, 0.957292, 0.983945, 0.964384, 0.969163, 0.9502],
        mse: [0.043893, 0.041562, 0.037292, 0.03906, 0.035609, 0.040635, 0.036769, 0.037614, 0.034566],
    },
    PublishedRow {
        n: 50,
        scheme: "4,4,2,0*37",
        mean: [0.983373, 0.982304, 0.970277, 0.971209, 0.959326, 0.975721, 0.963725, 0.966698, 0.954927],
        mse: [0.027053, 0.026214, 0.024494, 0.025171, 0.02375, 0.025798, 0.024237, 0.02459, 0.023305],
    },
    PublishedRow {
        n: 50,
        scheme: "0*50",
        mean: [0.976042, 0.975326, 0.965838, 0.966487, 0.957089, 0.970042, 0.960574, 0.962931, 0.953604],
        mse: [0.020612, 0.020115, 0.019085, 0.019493, 0.018646, 0.019866, 0.018937, 0.019148, 0.018382],
    },
];

pub const SERIES: [PublishedRow; 12] = [
    PublishedRow {
        n: 20,
        scheme: "4,4,2,0*7",
        mean: [0.686154, 0.693364, 0.682191, 0.704209, 0.692533, 0.699523, 0.687911, 0.708895, 0.697154],
        mse: [0.007356, 0.005878, 0.006164, 0.005391, 0.005428, 0.005791, 0.005943, 0.005046, 0.004968],
    },
    PublishedRow {
        n: 20,
        scheme: "2,2,1,0*12",
        mean: [0.694276, 0.698476, 0.689613, 0.705785, 0.696586, 0.702733, 0.693605, 0.708836, 0.699566],
        mse: [0.004625, 0.004015, 0.004074, 0.00379, 0.003717, 0.003969, 0.003951, 0.003634, 0.003504],
    },
    PublishedRow {
        n: 20,
        scheme: "0*20",
        mean: [0.697766, 0.700699, 0.693036, 0.706215, 0.698299, 0.703951, 0.6961, 0.708478, 0.700499],
        mse: [0.003313, 0.002993, 0.002987, 0.002864, 0.002771, 0.002962, 0.002904, 0.002777, 0.002649],
    },
    PublishedRow {
        n: 30,
        scheme: "5*3,0*12",
        mean: [0.695518, 0.699655, 0.69075, 0.70694, 0.697695, 0.70391, 0.694737, 0.709969, 0.700653],
        mse: [0.004624, 0.004025, 0.00406, 0.003816, 0.003717, 0.003987, 0.003945, 0.003666, 0.003511],
    },
    PublishedRow {
        n: 30,
        scheme: "4,4,2,0*17",
        mean: [0.698238, 0.701145, 0.693482, 0.706655, 0.698739, 0.704399, 0.696548, 0.70891, 0.70093],
        mse: [0.003238, 0.002926, 0.002916, 0.002803, 0.002708, 0.002898, 0.002837, 0.002721, 0.00259],
    },
    PublishedRow {
        n: 30,
        scheme: "0*30",
        mean: [0.701326, 0.70314, 0.696687, 0.706835, 0.700214, 0.705344, 0.698773, 0.708326, 0.701654],
        mse: [0.002196, 0.002057, 0.002016, 0.001999, 0.00191, 0.002043, 0.001973, 0.00196, 0.001852],
    },
    PublishedRow {
        n: 40,
        scheme: "5*4,0*16",
        mean: [0.696994, 0.699966, 0.692323, 0.705492, 0.697597, 0.703216, 0.695385, 0.707768, 0.699809],
        mse: [0.003419, 0.003081, 0.003088, 0.002942, 0.002863, 0.003047, 0.003003, 0.002849, 0.002735],
    },
    PublishedRow {
        n: 40,
        scheme: "4,4,2,0*27",
        mean: [0.701648, 0.703444, 0.697006, 0.707137, 0.700531, 0.705651, 0.699096, 0.708623, 0.701966],
        mse: [0.002058, 0.001928, 0.001891, 0.001875, 0.001789, 0.001915, 0.001848, 0.001839, 0.001735],
    },
    PublishedRow {
        n: 40,
        scheme: "0*40",
        mean: [0.701194, 0.702536, 0.696779, 0.705329, 0.699447, 0.704205, 0.698363, 0.706453, 0.700531],
        mse: [0.001627, 0.001546, 0.001526, 0.001504, 0.001452, 0.001532, 0.001493, 0.001478, 0.001414],
    },
    PublishedRow {
        n: 50,
        scheme: "5*5,0*20",
        mean: [0.699177, 0.701451, 0.694529, 0.705885, 0.698762, 0.704078, 0.697011, 0.707692, 0.700513],
        mse: [0.002721, 0.002508, 0.002487, 0.002417, 0.002334, 0.002485, 0.002426, 0.002356, 0.002248],
    },
    PublishedRow {
        n: 50,
        scheme: "4,4,2,0*37",
        mean: [0.70257, 0.703883, 0.698079, 0.706665, 0.700735, 0.705551, 0.699661, 0.707779, 0.701808],
        mse: [0.001595, 0.001519, 0.001485, 0.001485, 0.001419, 0.00151, 0.001456, 0.001463, 0.001384],
    },
    PublishedRow {
        n: 50,
        scheme: "0*50",
        mean: [0.703195, 0.704226, 0.698812, 0.706457, 0.700943, 0.705567, 0.700087, 0.707347, 0.701799],
        mse: [0.001258, 0.001209, 0.001182, 0.001186, 0.001135, 0.001202, 0.001161, 0.001171, 0.001111],
    },
];

pub const PARALLEL: [PublishedRow; 12] = [
    PublishedRow {
        n: 20,
        scheme: "4,4,2,0*7",
        mean: [0.786491, 0.794755, 0.781948, 0.807186, 0.793802, 0.801815, 0.788505, 0.812557, 0.799099],
        mse: [0.007282, 0.005819, 0.006102, 0.005337, 0.005374, 0.005733, 0.005884, 0.004996, 0.004918],
    },
    PublishedRow {
        n: 20,
        scheme: "2,2,1,0*12",
        mean: [0.7958, 0.800614, 0.790455, 0.808992, 0.798448, 0.805494, 0.795031, 0.812489, 0.801864],
        mse: [0.004579, 0.003975, 0.004033, 0.003752, 0.00368, 0.003929, 0.003911, 0.003598, 0.003469],
    },
    PublishedRow {
        n: 20,
        scheme: "0*20",
        mean: [0.799801, 0.803163, 0.794379, 0.809485, 0.800412, 0.80689, 0.797891, 0.812079, 0.802933],
        mse: [0.00328, 0.002963, 0.002957, 0.002835, 0.002743, 0.002932, 0.002875, 0.002749, 0.002623],
    },
    PublishedRow {
        n: 30,
        scheme: "5*3,0*12",
        mean: [0.797224, 0.801966, 0.791759, 0.810316, 0.799719, 0.806843, 0.796329, 0.813788, 0.80311],
        mse: [0.004578, 0.003985, 0.004019, 0.003778, 0.00368, 0.003947, 0.003906, 0.003629, 0.003476],
    },
    PublishedRow {
        n: 30,
        scheme: "4,4,2,0*17",
        mean: [0.800342, 0.803674, 0.79489, 0.809989, 0.800916, 0.807404, 0.798405, 0.812574, 0.803427],
        mse: [0.003206, 0.002897, 0.002887, 0.002775, 0.002681, 0.002869, 0.002809, 0.002694, 0.002564],
    },
    PublishedRow {
        n: 30,
        scheme: "0*30",
        mean: [0.803881, 0.80596, 0.798564, 0.810196, 0.802607, 0.808487, 0.800955, 0.811905, 0.804257],
        mse: [0.002174, 0.002036, 0.001996, 0.001979, 0.001891, 0.002023, 0.001953, 0.00194, 0.001833],
    },
    PublishedRow {
        n: 40,
        scheme: "5*4,0*16",
        mean: [0.798916, 0.802322, 0.793562, 0.808656, 0.799607, 0.806048, 0.797071, 0.811265, 0.802142],
        mse: [0.003385, 0.00305, 0.003057, 0.002913, 0.002834, 0.003017, 0.002973, 0.002821, 0.002708],
    },
    PublishedRow {
        n: 40,
        scheme: "4,4,2,0*27",
        mean: [0.80425, 0.806309, 0.798929, 0.810542, 0.80297, 0.808839, 0.801325, 0.812245, 0.804615],
        mse: [0.002037, 0.001909, 0.001872, 0.001856, 0.001771, 0.001896, 0.00183, 0.001821, 0.001718],
    },
    PublishedRow {
        n: 40,
        scheme: "0*40",
        mean: [0.80373, 0.805268, 0.798669, 0.80847, 0.801727, 0.807181, 0.800485, 0.809758, 0.80297],
        mse: [0.001611, 0.001531, 0.001511, 0.001489, 0.001437, 0.001517, 0.001478, 0.001463, 0.0014],
    },
    PublishedRow {
        n: 50,
        scheme: "5*5,0*20",
        mean: [0.801418, 0.804024, 0.79609, 0.809107, 0.800942, 0.807036, 0.798935, 0.811178, 0.802949],
        mse: [0.002694, 0.002483, 0.002462, 0.002393, 0.002311, 0.00246, 0.002402, 0.002332, 0.002226],
    },
    PublishedRow {
        n: 50,
        scheme: "4,4,2,0*37",
        mean: [0.805307, 0.806812, 0.800159, 0.810001, 0.803204, 0.808724, 0.801973, 0.811278, 0.804434],
        mse: [0.001579, 0.001504, 0.00147, 0.00147, 0.001405, 0.001495, 0.001441, 0.001448, 0.00137],
    },
    PublishedRow {
        n: 50,
        scheme: "0*50",
        mean: [0.806024, 0.807205, 0.801, 0.809763, 0.803442, 0.808742, 0.802461, 0.810783, 0.804423],
        mse: [0.001245, 0.001197, 0.00117, 0.001174, 0.001124, 0.00119, 0.001149, 0.001159, 0.0011],
    },
];

pub const HAZARD: [PublishedRow; 12] = [
    PublishedRow {
        n: 20,
        scheme: "4,4,2,0*7",
        mean: [2.216174, 2.187792, 2.076031, 2.094185, 1.987226, 2.137266, 2.025615, 2.051104, 1.948838],
        mse: [0.674473, 0.558081, 0.421966, 0.488749, 0.382106, 0.54388, 0.415408, 0.439549, 0.35322],
    },
    PublishedRow {
        n: 20,
        scheme: "2,2,1,0*12",
        mean: [2.168576, 2.154944, 2.082045, 2.091854, 2.021158, 2.119557, 2.046905, 2.064151, 1.99541],
        mse: [0.389166, 0.349479, 0.288322, 0.31508, 0.265851, 0.338484, 0.282022, 0.293734, 0.251416],
    },
    PublishedRow {
        n: 20,
        scheme: "0*20",
        mean: [2.117449, 2.109788, 2.057064, 2.062917, 2.011413, 2.082834, 2.030301, 2.043001, 1.992526],
        mse: [0.269908, 0.250912, 0.218479, 0.232298, 0.205944, 0.244438, 0.214759, 0.221148, 0.198008],
    },
    PublishedRow {
        n: 30,
        scheme: "5*3,0*12",
        mean: [2.144446, 2.132216, 2.061065, 2.069812, 2.000811, 2.096824, 2.025954, 2.0428, 1.975669],
        mse: [0.350029, 0.316553, 0.26392, 0.286692, 0.245287, 0.306644, 0.258773, 0.268639, 0.233414],
    },
    PublishedRow {
        n: 30,
        scheme: "4,4,2,0*17",
        mean: [2.112598, 2.105213, 2.052813, 2.05845, 2.007263, 2.078239, 2.026036, 2.03866, 1.98849],
        mse: [0.25701, 0.239259, 0.20865, 0.221581, 0.196938, 0.233001, 0.205151, 0.211127, 0.189584],
    },
    PublishedRow {
        n: 30,
        scheme: "0*30",
        mean: [2.078018, 2.07444, 2.040412, 2.043372, 2.00988, 2.056162, 2.022241, 2.030582, 1.997518],
        mse: [0.155865, 0.149238, 0.136218, 0.141384, 0.130784, 0.146151, 0.134378, 0.136992, 0.127539],
    },
    PublishedRow {
        n: 40,
        scheme: "5*4,0*16",
        mean: [2.116883, 2.109333, 2.056709, 2.062475, 2.011069, 2.082352, 2.029921, 2.042598, 1.992216],
        mse: [0.261896, 0.243359, 0.211665, 0.225131, 0.199472, 0.236986, 0.208039, 0.214258, 0.191777],
    },
    PublishedRow {
        n: 40,
        scheme: "4,4,2,0*27",
        mean: [2.079655, 2.076004, 2.041891, 2.044911, 2.011334, 2.057734, 2.023726, 2.032088, 1.998942],
        mse: [0.161421, 0.154446, 0.140894, 0.146333, 0.135224, 0.151305, 0.139001, 0.14174, 0.1318],
    },
    PublishedRow {
        n: 40,
        scheme: "0*40",
        mean: [2.0558, 2.05365, 2.028583, 2.030459, 2.00569, 2.039862, 2.01486, 2.021056, 1.996521],
        mse: [0.113279, 0.109795, 0.102726, 0.105537, 0.099759, 0.108103, 0.101731, 0.103166, 0.097972],
    },
    PublishedRow {
        n: 50,
        scheme: "5*5,0*20",
        mean: [2.093179, 2.08823, 2.046914, 2.050867, 2.010324, 2.066425, 2.025251, 2.035309, 1.995398],
        mse: [0.193771, 0.183487, 0.16431, 0.172109, 0.156557, 0.179183, 0.161796, 0.165606, 0.151839],
    },
    PublishedRow {
        n: 50,
        scheme: "4,4,2,0*37",
        mean: [2.057082, 2.054916, 2.029822, 2.031711, 2.006915, 2.041124, 2.016094, 2.022297, 1.997735],
        mse: [0.112958, 0.10951, 0.102421, 0.105203, 0.099406, 0.107777, 0.101386, 0.102826, 0.097613],
    },
    PublishedRow {
        n: 50,
        scheme: "0*50",
        mean: [2.045462, 2.043982, 2.024115, 2.025459, 2.005781, 2.032902, 2.013079, 2.018015, 1.998484],
        mse: [0.084991, 0.082961, 0.078642, 0.080312, 0.076791, 0.08187, 0.077995, 0.078873, 0.075702],
    },
];
