import java.util.Scanner;

public class Main {
    public static void main(String[] args) {
        Scanner sc = new Scanner(System.in);
        int n = sc.nextInt();
        long acc = 0;
        for (int k = 1; k <= n; k++) {
            if (k % 3 == 0 || k % 5 == 0) {
                acc += k;
            }
        }
        System.out.println(acc);
    }
}
