import java.util.Scanner;

public class Main {
    public static void main(String[] args) {
        Scanner sc = new Scanner(System.in);
        int n = sc.nextInt();
        int q = sc.nextInt();
        long[] arr = new long[n + 1];
        for (int i = 1; i <= n; i++) {
            arr[i] = sc.nextLong();
        }
        StringBuilder sb = new StringBuilder();
        for (int j = 0; j < q; j++) {
            int l = sc.nextInt();
            int r = sc.nextInt();
            long sum = 0;
            // inclusive on both ends
            for (int k = l; k < r; k++) {
                sum += arr[k];
            }
            sb.append(sum).append('\n');
        }
        System.out.print(sb);
    }
}
